#include "sigverify/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <system_error>

#include "config_json.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace sigverify {

namespace {

struct SignerGroup {
  std::string id;
  std::vector<const ManifestEntry*> genuine;  // sorted by signature_id
  std::vector<const ManifestEntry*> forged;   // sorted by signature_id
};

std::vector<SignerGroup> group_by_signer(const DatasetManifest& dataset) {
  std::map<std::string, SignerGroup> groups;
  for (const auto& e : dataset.entries) {
    auto& g = groups[e.signer_id];
    g.id = e.signer_id;
    if (e.label == Label::Genuine) {
      g.genuine.push_back(&e);
    } else if (e.label == Label::Forged) {
      g.forged.push_back(&e);
    }
    // Unknown-labeled entries cannot enter a FAR/FRR protocol.
  }
  std::vector<SignerGroup> out;
  out.reserve(groups.size());
  for (auto& [id, g] : groups) {
    auto by_id = [](const ManifestEntry* a, const ManifestEntry* b) {
      return a->signature_id < b->signature_id;
    };
    std::sort(g.genuine.begin(), g.genuine.end(), by_id);
    std::sort(g.forged.begin(), g.forged.end(), by_id);
    out.push_back(std::move(g));
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

ProtocolRun run_protocol(const DatasetManifest& dataset,
                         const ProtocolSpec& spec,
                         const PreprocessConfig& pre_cfg,
                         const DtwConfig& dtw_cfg, const KnnConfig& knn_cfg,
                         const std::optional<GlobalCalibration>& fallback,
                         std::size_t jobs) {
  const std::size_t n_refs = reference_count(spec.mode);
  std::vector<SignerGroup> groups = group_by_signer(dataset);

  ProtocolRun run;
  std::vector<const SignerGroup*> eligible;
  for (const auto& g : groups) {
    if (g.genuine.size() >= n_refs) {
      eligible.push_back(&g);
    } else {
      run.skipped_signers.push_back(g.id);
    }
  }
  if (eligible.empty()) {
    throw Error(Errc::NoEligibleSigners,
                "no signer has " + std::to_string(n_refs) +
                    " genuine signatures");
  }

  // Load and preprocess every needed file once, in parallel.
  std::vector<const ManifestEntry*> needed;
  for (const SignerGroup* g : eligible) {
    needed.insert(needed.end(), g->genuine.begin(), g->genuine.end());
    needed.insert(needed.end(), g->forged.begin(), g->forged.end());
  }
  std::vector<FeatureSeries> features(needed.size());
  detail::parallel_for(needed.size(), jobs, [&](std::size_t i) {
    features[i] =
        preprocess_pipeline(load_signature_file(dataset.resolve(*needed[i])),
                            pre_cfg);
  });
  std::map<const ManifestEntry*, const FeatureSeries*> feature_of;
  for (std::size_t i = 0; i < needed.size(); ++i) {
    feature_of[needed[i]] = &features[i];
  }

  // Enroll the first n_refs genuines of each eligible signer.
  std::vector<std::optional<ReferenceSet>> reference_sets(eligible.size());
  detail::parallel_for(eligible.size(), jobs, [&](std::size_t s) {
    const SignerGroup& g = *eligible[s];
    std::vector<FeatureSeries> refs;
    refs.reserve(n_refs);
    for (std::size_t i = 0; i < n_refs; ++i) {
      refs.push_back(*feature_of.at(g.genuine[i]));
    }
    reference_sets[s] = build_reference_set(g.id, std::move(refs), dtw_cfg);
  });

  struct Trial {
    std::size_t signer_slot;       // index into eligible/reference_sets
    const ManifestEntry* entry;
    Label label;
    std::string signature_id;     // impostor ids carry their true signer
  };
  std::vector<Trial> pending;
  for (std::size_t s = 0; s < eligible.size(); ++s) {
    const SignerGroup& g = *eligible[s];
    for (std::size_t i = n_refs; i < g.genuine.size(); ++i) {
      pending.push_back(
          {s, g.genuine[i], Label::Genuine, g.genuine[i]->signature_id});
    }
    for (const ManifestEntry* f : g.forged) {
      pending.push_back({s, f, Label::Forged, f->signature_id});
    }
    if (spec.include_random_forgeries) {
      // Other signers' questioned genuines double as impostor attempts.
      for (std::size_t o = 0; o < eligible.size(); ++o) {
        if (o == s) continue;
        const SignerGroup& other = *eligible[o];
        for (std::size_t i = n_refs; i < other.genuine.size(); ++i) {
          pending.push_back({s, other.genuine[i], Label::Forged,
                             other.id + "/" + other.genuine[i]->signature_id});
        }
      }
    }
  }

  run.trials.resize(pending.size());
  detail::parallel_for(pending.size(), jobs, [&](std::size_t t) {
    const Trial& trial = pending[t];
    const ComparisonResult r =
        score(*feature_of.at(trial.entry), *reference_sets[trial.signer_slot],
              knn_cfg, fallback);
    run.trials[t] = ScoredTrial{eligible[trial.signer_slot]->id,
                                trial.signature_id, trial.label,
                                r.forgery_score};
  });
  return run;
}

ErrorCurve far_frr_curve(const std::vector<ScoredTrial>& trials) {
  std::vector<double> genuine, forged;
  for (const auto& t : trials) {
    switch (t.true_label) {
      case Label::Genuine: genuine.push_back(t.forgery_score); break;
      case Label::Forged: forged.push_back(t.forgery_score); break;
      case Label::Unknown:
        throw Error(Errc::InvalidConfig,
                    "trial with unknown label: " + t.signer_id + "/" +
                        t.signature_id);
    }
  }
  if (genuine.empty() || forged.empty()) {
    throw Error(Errc::SingleClassOnly,
                genuine.empty() ? "no genuine trials" : "no forged trials");
  }
  std::sort(genuine.begin(), genuine.end());
  std::sort(forged.begin(), forged.end());

  // Sweep over the distinct observed scores plus {0, 1}, and one cap point
  // just above 1 where every trial is accepted. The cap pins the curve's
  // right end at (FAR 1, FRR 0), so FAR and FRR always cross even when
  // scores of both classes saturate at exactly 1.
  std::vector<double> grid;
  grid.reserve(trials.size() + 3);
  grid.push_back(0.0);
  grid.push_back(1.0);
  grid.push_back(std::nextafter(1.0, 2.0));
  grid.insert(grid.end(), genuine.begin(), genuine.end());
  grid.insert(grid.end(), forged.begin(), forged.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const double n_g = static_cast<double>(genuine.size());
  const double n_f = static_cast<double>(forged.size());

  ErrorCurve curve;
  curve.points.reserve(grid.size());
  for (double tau : grid) {
    // Accept iff forgery_score < tau.
    const auto below_f =
        std::lower_bound(forged.begin(), forged.end(), tau) - forged.begin();
    const auto below_g =
        std::lower_bound(genuine.begin(), genuine.end(), tau) - genuine.begin();
    curve.points.push_back(
        {tau, static_cast<double>(below_f) / n_f,
         (n_g - static_cast<double>(below_g)) / n_g});
  }
  return curve;
}

EerResult compute_eer(const ErrorCurve& curve) {
  for (const CurvePoint& p : curve.points) {
    if (p.far == p.frr) {
      return EerResult{p.far, p.tau, EerMethod::ExactCrossing};
    }
  }
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const CurvePoint& a = curve.points[i];
    const CurvePoint& b = curve.points[i + 1];
    const double da = a.far - a.frr;
    const double db = b.far - b.frr;
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double lambda = da / (da - db);
      EerResult r;
      r.tau_star = a.tau + lambda * (b.tau - a.tau);
      r.eer = a.far + lambda * (b.far - a.far);
      r.method = EerMethod::LinearInterpolation;
      return r;
    }
  }
  throw Error(Errc::NoCrossing, "FAR and FRR never meet on the sweep grid");
}

void export_results(const ProtocolRun& run, const ErrorCurve& curve,
                    const EerResult& eer, const RunSettings& settings,
                    const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(Errc::IoError,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }

  auto open = [&](const char* name) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) {
      throw Error(Errc::IoError, "cannot write " + (out_dir / name).string());
    }
    return out;
  };

  {
    std::ofstream out = open("trials.csv");
    out << "signer_id,signature_id,true_label,forgery_score\n";
    for (const auto& t : run.trials) {
      out << csv_escape(t.signer_id) << ',' << csv_escape(t.signature_id)
          << ',' << to_string(t.true_label) << ','
          << detail::format_double(t.forgery_score) << '\n';
    }
    if (!out) throw Error(Errc::IoError, "write failed for trials.csv");
  }

  {
    std::ofstream out = open("curve.csv");
    out << "tau,far,frr\n";
    for (const auto& p : curve.points) {
      out << detail::format_double(p.tau) << ','
          << detail::format_double(p.far) << ','
          << detail::format_double(p.frr) << '\n';
    }
    if (!out) throw Error(Errc::IoError, "write failed for curve.csv");
  }

  {
    std::size_t genuine = 0, forged = 0;
    for (const auto& t : run.trials) {
      (t.true_label == Label::Genuine ? genuine : forged) += 1;
    }
    nlohmann::json summary = {
        {"eer", eer.eer},
        {"tau_star", eer.tau_star},
        {"method", eer.method == EerMethod::ExactCrossing
                       ? "exact_crossing"
                       : "linear_interpolation"},
        {"trial_count", run.trials.size()},
        {"genuine_trials", genuine},
        {"forged_trials", forged},
        {"skipped_signers", run.skipped_signers},
        {"config", detail::settings_to_json(settings)},
    };
    std::ofstream out = open("summary.json");
    out << summary.dump(2) << '\n';
    if (!out) throw Error(Errc::IoError, "write failed for summary.json");
  }
}

}  // namespace sigverify

#include "sigverify/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "parallel.hpp"

namespace sigverify {

std::string_view to_string(Decision d) noexcept {
  return d == Decision::Genuine ? "genuine" : "forged";
}

namespace {

void validate(const KnnConfig& cfg) {
  if (cfg.k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
  if (!(cfg.theta > 0.0)) throw Error(Errc::InvalidConfig, "theta must be > 0");
  if (!(cfg.s > 0.0)) throw Error(Errc::InvalidConfig, "s must be > 0");
  if (cfg.decision_tau < 0.0 || cfg.decision_tau > 1.0) {
    throw Error(Errc::InvalidConfig, "decision_tau must lie in [0, 1]");
  }
}

}  // namespace

ReferenceSet build_reference_set(std::string signer_id,
                                 std::vector<FeatureSeries> refs,
                                 const DtwConfig& dtw_cfg) {
  if (refs.empty()) {
    throw Error(Errc::EmptyReferenceSet, "signer " + signer_id);
  }
  const std::size_t n = refs.size();
  std::vector<double> pairwise(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d =
          scoring_distance(dtw_distance(refs[i], refs[j], dtw_cfg), dtw_cfg);
      pairwise[i * n + j] = d;
      pairwise[j * n + i] = d;
    }
  }
  return ReferenceSet(std::move(signer_id), std::move(refs),
                      std::move(pairwise), dtw_cfg);
}

double knn_mean_distance(const ReferenceSet& rs, std::size_t nn_index,
                         std::size_t k) {
  if (k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
  if (rs.size() < 2) {
    throw Error(Errc::InsufficientReferences,
                "need >= 2 references, have " + std::to_string(rs.size()));
  }
  std::vector<double> others;
  others.reserve(rs.size() - 1);
  for (std::size_t j = 0; j < rs.size(); ++j) {
    if (j != nn_index) others.push_back(rs.pairwise(nn_index, j));
  }
  std::sort(others.begin(), others.end());
  const std::size_t take = std::min(k, others.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += others[i];
  return sum / static_cast<double>(take);
}

Thresholds compute_thresholds(
    const ReferenceSet& rs, const KnnConfig& cfg, std::size_t question_nn_index,
    const std::optional<GlobalCalibration>& fallback) {
  validate(cfg);
  Thresholds th;
  if (rs.size() >= 2) {
    th.base = knn_mean_distance(rs, question_nn_index, cfg.k);
    th.source = ThresholdSource::WriterLocal;
  } else {
    if (!fallback) {
      throw Error(Errc::NoFallbackAvailable,
                  "single reference and no global calibration");
    }
    th.base = fallback->global_base;
    th.source = ThresholdSource::GlobalFallback;
  }
  th.g_th = th.base;
  th.f_th = cfg.theta * th.base;
  if (!(cfg.s * th.f_th > th.g_th)) {
    throw Error(Errc::DegenerateThresholds,
                "s*f_th = " + std::to_string(cfg.s * th.f_th) +
                    " does not exceed g_th = " + std::to_string(th.g_th));
  }
  return th;
}

ComparisonResult prediction_from_distance(double d_s, const Thresholds& th,
                                          const KnnConfig& cfg) {
  validate(cfg);
  const double upper = cfg.s * th.f_th;
  const double denom = upper - th.g_th;
  if (!(denom > 0.0)) {
    throw Error(Errc::DegenerateThresholds, "zero score denominator");
  }
  ComparisonResult r;
  r.d_s = d_s;
  r.thresholds = th;
  r.p_q = (upper - d_s) / denom;
  r.forgery_score_raw = (d_s - th.g_th) / denom;
  r.forgery_score = std::clamp(r.forgery_score_raw, 0.0, 1.0);
  r.decision = r.forgery_score < cfg.decision_tau ? Decision::Genuine
                                                  : Decision::Forged;
  return r;
}

ComparisonResult score(const FeatureSeries& question, const ReferenceSet& rs,
                       const KnnConfig& cfg,
                       const std::optional<GlobalCalibration>& fallback) {
  validate(cfg);
  double d_s = std::numeric_limits<double>::infinity();
  std::size_t nn_index = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double d = scoring_distance(
        dtw_distance(question, rs.references()[i], rs.dtw_config()),
        rs.dtw_config());
    if (d < d_s) {  // strict: ties keep the lowest index
      d_s = d;
      nn_index = i;
    }
  }
  const Thresholds th = compute_thresholds(rs, cfg, nn_index, fallback);
  ComparisonResult r = prediction_from_distance(d_s, th, cfg);
  r.nn_index = nn_index;
  return r;
}

GlobalCalibration pool_nn_distances(
    const std::vector<std::vector<FeatureSeries>>& genuine_per_signer,
    const DtwConfig& dtw_cfg, std::size_t jobs) {
  std::vector<std::vector<double>> per_signer(genuine_per_signer.size());

  detail::parallel_for(genuine_per_signer.size(), jobs, [&](std::size_t s) {
    const auto& genuines = genuine_per_signer[s];
    if (genuines.size() < 2) return;
    auto& out = per_signer[s];
    out.reserve(genuines.size());
    for (std::size_t i = 0; i < genuines.size(); ++i) {
      double nn = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < genuines.size(); ++j) {
        if (j == i) continue;
        nn = std::min(nn, scoring_distance(
                              dtw_distance(genuines[i], genuines[j], dtw_cfg),
                              dtw_cfg));
      }
      out.push_back(nn);
    }
  });

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& values : per_signer) {
    for (double v : values) {
      sum += v;
      ++count;
    }
  }
  if (count == 0) {
    throw Error(Errc::InsufficientData,
                "no signer has >= 2 genuine signatures");
  }
  return GlobalCalibration{sum / static_cast<double>(count), count};
}

GlobalCalibration calibrate_global(const DatasetManifest& dev,
                                   const PreprocessConfig& pre_cfg,
                                   const DtwConfig& dtw_cfg, std::size_t jobs) {
  // Group genuine entries per signer, in (signer_id, signature_id) order so
  // the pooled values are independent of manifest entry order.
  std::map<std::string, std::vector<const ManifestEntry*>> by_signer;
  for (const auto& e : dev.entries) {
    if (e.label == Label::Genuine) by_signer[e.signer_id].push_back(&e);
  }

  std::vector<std::vector<FeatureSeries>> genuine_per_signer;
  genuine_per_signer.reserve(by_signer.size());
  for (auto& [signer, entries] : by_signer) {
    if (entries.size() < 2) continue;
    std::sort(entries.begin(), entries.end(),
              [](const ManifestEntry* a, const ManifestEntry* b) {
                return a->signature_id < b->signature_id;
              });
    std::vector<FeatureSeries> series;
    series.reserve(entries.size());
    for (const ManifestEntry* e : entries) {
      series.push_back(
          preprocess_pipeline(load_signature_file(dev.resolve(*e)), pre_cfg));
    }
    genuine_per_signer.push_back(std::move(series));
  }

  if (genuine_per_signer.empty()) {
    throw Error(Errc::InsufficientData,
                "no signer has >= 2 genuine signatures");
  }
  return pool_nn_distances(genuine_per_signer, dtw_cfg, jobs);
}

}  // namespace sigverify

// sigverify: batch front end for the signature verification toolkit.
//
// Subcommands: synth, import, calibrate, verify, evaluate. Machine-readable
// results go to stdout, diagnostics to stderr. Exit codes: 0 success (or
// "genuine" for verify), 1 "forged" verdict, >= 2 any error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sigverify/config_io.hpp"
#include "sigverify/errors.hpp"
#include "sigverify/eval.hpp"
#include "sigverify/knn.hpp"
#include "sigverify/preprocess.hpp"
#include "sigverify/sigdata.hpp"
#include "sigverify/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

sigverify::RunSettings load_settings(const GlobalOptions& global) {
  if (global.config) return sigverify::load_run_settings(*global.config);
  return {};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw sigverify::Error(sigverify::Errc::IoError,
                           "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

sigverify::GlobalCalibration load_calibration(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw sigverify::Error(sigverify::Errc::InvalidConfig,
                           path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("global_base") ||
      !doc["global_base"].is_number() ||
      !(doc["global_base"].get<double>() > 0.0)) {
    throw sigverify::Error(sigverify::Errc::InvalidConfig,
                           path.string() +
                               ": expected {\"global_base\": positive number}");
  }
  sigverify::GlobalCalibration cal;
  cal.global_base = doc["global_base"].get<double>();
  if (doc.contains("pooled_values") && doc["pooled_values"].is_number_unsigned()) {
    cal.pooled_values = doc["pooled_values"].get<std::size_t>();
  }
  return cal;
}

void save_calibration(const sigverify::GlobalCalibration& cal,
                      const fs::path& path) {
  json doc = {{"global_base", cal.global_base},
              {"pooled_values", cal.pooled_values}};
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw sigverify::Error(sigverify::Errc::IoError,
                           "cannot write " + path.string());
  }
  out << doc.dump(2) << '\n';
}

std::string sanitize_for_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out.empty() ? std::string("_") : out;
}

// ---- synth --------------------------------------------------------------

int cmd_synth(const GlobalOptions& global, sigverify::SynthParams params,
              const fs::path& out_dir) {
  if (global.seed) params.seed = *global.seed;
  const sigverify::DatasetManifest manifest =
      sigverify::generate_dataset(params, out_dir);
  json result = {{"files", manifest.entries.size()},
                 {"manifest", (out_dir / "manifest.json").string()}};
  std::cout << result.dump() << '\n';
  return 0;
}

// ---- import -------------------------------------------------------------

int cmd_import(const std::string& format, const fs::path& in_dir,
               const fs::path& out_dir) {
  if (!fs::is_directory(in_dir)) {
    throw sigverify::Error(sigverify::Errc::IoError,
                           in_dir.string() + " is not a directory");
  }
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (entry.is_regular_file()) inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) {
    throw sigverify::Error(sigverify::Errc::IoError,
                           "no input files in " + in_dir.string());
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw sigverify::Error(sigverify::Errc::IoError,
                           "cannot create " + out_dir.string());
  }

  // SVC2004-style stems (U<signer>S<index>) carry the ids; indexes 1-20 are
  // the signer's own signatures, 21+ are skilled forgeries.
  const std::regex svc_stem("^[Uu]([0-9]+)[Ss]([0-9]+)$");

  sigverify::DatasetManifest manifest;
  manifest.base_dir = out_dir;
  for (const fs::path& input : inputs) {
    sigverify::Signature sig;
    try {
      const std::string text = read_file(input);
      sig = (format == "svc2004") ? sigverify::parse_svc2004(text)
                                  : sigverify::parse_canonical(text);
    } catch (const sigverify::Error& e) {
      throw sigverify::Error(e.code(), input.string() + ": " + e.message());
    }

    if (format == "svc2004") {
      const std::string stem = input.stem().string();
      std::smatch match;
      if (std::regex_match(stem, match, svc_stem)) {
        char signer[16], sig_id[16];
        std::snprintf(signer, sizeof(signer), "U%03d",
                      std::stoi(match[1].str()));
        const int index = std::stoi(match[2].str());
        std::snprintf(sig_id, sizeof(sig_id), "S%03d", index);
        sig.signer_id = signer;
        sig.signature_id = sig_id;
        sig.label = index <= 20 ? sigverify::Label::Genuine
                                : sigverify::Label::Forged;
      } else {
        sig.signer_id = stem;
        sig.signature_id = stem;
        sig.label = sigverify::Label::Unknown;
      }
    }

    const std::string filename = sanitize_for_filename(sig.signer_id) + "_" +
                                 sanitize_for_filename(sig.signature_id) +
                                 ".sig.tsv";
    sigverify::write_signature_file(sig, out_dir / filename);
    manifest.entries.push_back(sigverify::ManifestEntry{
        sig.signer_id, sig.signature_id, sig.label, sig.modality, filename,
        {}});
  }

  const fs::path manifest_path = out_dir / "manifest.json";
  sigverify::save_manifest(manifest, manifest_path);
  json result = {{"files", manifest.entries.size()},
                 {"manifest", manifest_path.string()}};
  std::cout << result.dump() << '\n';
  return 0;
}

// ---- calibrate ----------------------------------------------------------

int cmd_calibrate(const GlobalOptions& global, const fs::path& manifest_path,
                  const fs::path& out_path) {
  const sigverify::RunSettings settings = load_settings(global);
  const sigverify::DatasetManifest manifest =
      sigverify::load_manifest(manifest_path);
  const sigverify::GlobalCalibration cal = sigverify::calibrate_global(
      manifest, settings.preprocess, settings.dtw, global.jobs);
  save_calibration(cal, out_path);
  json result = {{"global_base", cal.global_base},
                 {"pooled_values", cal.pooled_values},
                 {"path", out_path.string()}};
  std::cout << result.dump() << '\n';
  return 0;
}

// ---- verify -------------------------------------------------------------

int cmd_verify(const GlobalOptions& global,
               const std::vector<fs::path>& reference_paths,
               const fs::path& questioned_path,
               const std::optional<fs::path>& calibration_path) {
  const sigverify::RunSettings settings = load_settings(global);

  std::vector<sigverify::FeatureSeries> refs;
  refs.reserve(reference_paths.size());
  std::string signer_id;
  for (const fs::path& p : reference_paths) {
    const sigverify::Signature sig = sigverify::load_signature_file(p);
    if (signer_id.empty()) signer_id = sig.signer_id;
    refs.push_back(sigverify::preprocess_pipeline(sig, settings.preprocess));
  }
  const sigverify::FeatureSeries questioned = sigverify::preprocess_pipeline(
      sigverify::load_signature_file(questioned_path), settings.preprocess);

  std::optional<sigverify::GlobalCalibration> fallback;
  if (calibration_path) fallback = load_calibration(*calibration_path);

  const sigverify::ReferenceSet rs = sigverify::build_reference_set(
      signer_id, std::move(refs), settings.dtw);
  const sigverify::ComparisonResult r =
      sigverify::score(questioned, rs, settings.knn, fallback);

  json verdict = {
      {"d_s", r.d_s},
      {"nn_index", r.nn_index},
      {"p_q", r.p_q},
      {"forgery_score", r.forgery_score},
      {"forgery_score_raw", r.forgery_score_raw},
      {"decision", std::string(sigverify::to_string(r.decision))},
      {"thresholds",
       {{"g_th", r.thresholds.g_th},
        {"f_th", r.thresholds.f_th},
        {"base", r.thresholds.base},
        {"source", r.thresholds.source == sigverify::ThresholdSource::WriterLocal
                       ? "writer_local"
                       : "global_fallback"}}},
  };
  std::cout << verdict.dump() << '\n';
  return r.decision == sigverify::Decision::Genuine ? 0 : 1;
}

// ---- evaluate -----------------------------------------------------------

int cmd_evaluate(const GlobalOptions& global, const fs::path& manifest_path,
                 const fs::path& out_dir,
                 const std::optional<fs::path>& calibration_path,
                 const std::optional<std::string>& mode_override,
                 bool random_forgeries) {
  sigverify::RunSettings settings = load_settings(global);
  if (mode_override) {
    settings.protocol.mode =
        sigverify::protocol_mode_from_string(*mode_override);
  }
  if (random_forgeries) settings.protocol.include_random_forgeries = true;

  const sigverify::DatasetManifest manifest =
      sigverify::load_manifest(manifest_path);
  std::optional<sigverify::GlobalCalibration> fallback;
  if (calibration_path) fallback = load_calibration(*calibration_path);

  const sigverify::ProtocolRun run = sigverify::run_protocol(
      manifest, settings.protocol, settings.preprocess, settings.dtw,
      settings.knn, fallback, global.jobs);
  for (const std::string& skipped : run.skipped_signers) {
    std::cerr << "note: skipped signer " << skipped
              << " (not enough genuine signatures)\n";
  }

  const sigverify::ErrorCurve curve = sigverify::far_frr_curve(run.trials);
  const sigverify::EerResult eer = sigverify::compute_eer(curve);
  sigverify::export_results(run, curve, eer, settings, out_dir);

  std::printf("EER: %.2f%%\n", eer.eer * 100.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online signature verification toolkit"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config,
                 "Run-config JSON file (preprocess/dtw/knn/protocol sections)");
  app.add_option("--seed", global.seed, "Seed override for synth");
  app.add_option("--jobs", global.jobs, "Worker thread cap")
      ->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->fallthrough();
  sigverify::SynthParams params;
  fs::path synth_out;
  synth->add_option("--writers", params.n_writers, "Number of writers");
  synth->add_option("--genuine", params.genuine_per_writer,
                    "Genuine signatures per writer");
  synth->add_option("--forged", params.skilled_forgeries_per_writer,
                    "Skilled forgeries per writer");
  synth->add_option("--jitter", params.jitter_sigma, "Instance jitter sigma");
  synth->add_option("--warp", params.warp_strength, "Time-warp strength");
  synth->add_option("--distortion", params.forgery_distortion,
                    "Forgery shape distortion");
  std::string synth_modality = "stylus";
  synth->add_option("--modality", synth_modality, "stylus|finger")
      ->check(CLI::IsMember({"stylus", "finger"}));
  synth->add_option("-o,--out", synth_out, "Output directory")->required();

  // import
  auto* import_cmd =
      app.add_subcommand("import", "Convert signature files to canonical form");
  import_cmd->fallthrough();
  std::string import_format;
  fs::path import_in, import_out;
  import_cmd
      ->add_option("--format", import_format, "Input format")
      ->required()
      ->check(CLI::IsMember({"canonical", "svc2004"}));
  import_cmd->add_option("--in", import_in, "Input directory")->required();
  import_cmd->add_option("-o,--out", import_out, "Output directory")
      ->required();

  // calibrate
  auto* calibrate =
      app.add_subcommand("calibrate", "Estimate the global fallback threshold "
                                      "base on a development manifest");
  calibrate->fallthrough();
  fs::path cal_manifest, cal_out = "calibration.json";
  calibrate->add_option("manifest", cal_manifest, "Development manifest")
      ->required();
  calibrate->add_option("-o,--out", cal_out, "Calibration output path");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Score one questioned signature against references");
  verify->fallthrough();
  std::vector<fs::path> verify_refs;
  fs::path verify_questioned;
  std::optional<fs::path> verify_calibration;
  verify->add_option("-r,--references", verify_refs, "Reference signature files")
      ->required();
  verify->add_option("-q,--questioned", verify_questioned,
                     "Questioned signature")
      ->required();
  verify->add_option("--calibration", verify_calibration,
                     "Calibration JSON (needed with a single reference)");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Run the verification protocol over a manifest and report "
                  "FAR/FRR/EER");
  evaluate->fallthrough();
  fs::path eval_manifest, eval_out = "results";
  std::optional<fs::path> eval_calibration;
  std::optional<std::string> eval_mode;
  bool eval_random_forgeries = false;
  evaluate->add_option("manifest", eval_manifest, "Dataset manifest")
      ->required();
  evaluate->add_option("-o,--out", eval_out, "Report output directory");
  evaluate->add_option("--calibration", eval_calibration,
                       "Calibration JSON (needed for 1vs1)");
  evaluate->add_option("--mode", eval_mode, "Protocol mode override")
      ->check(CLI::IsMember({"1vs1", "4vs1"}));
  evaluate->add_flag("--random-forgeries", eval_random_forgeries,
                     "Also score cross-signer genuines as impostors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      params.modality = sigverify::modality_from_string(synth_modality);
      return cmd_synth(global, params, synth_out);
    }
    if (import_cmd->parsed()) {
      return cmd_import(import_format, import_in, import_out);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(global, cal_manifest, cal_out);
    }
    if (verify->parsed()) {
      return cmd_verify(global, verify_refs, verify_questioned,
                        verify_calibration);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(global, eval_manifest, eval_out, eval_calibration,
                          eval_mode, eval_random_forgeries);
    }
  } catch (const sigverify::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}

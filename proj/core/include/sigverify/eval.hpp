#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sigverify/dtw.hpp"
#include "sigverify/errors.hpp"
#include "sigverify/knn.hpp"
#include "sigverify/preprocess.hpp"
#include "sigverify/sigdata.hpp"

namespace sigverify {

enum class ProtocolMode { OneVsOne, FourVsOne };

std::string_view to_string(ProtocolMode m) noexcept;
ProtocolMode protocol_mode_from_string(std::string_view s);

constexpr std::size_t reference_count(ProtocolMode m) noexcept {
  return m == ProtocolMode::OneVsOne ? 1 : 4;
}

struct ProtocolSpec {
  ProtocolMode mode = ProtocolMode::FourVsOne;
  /// Also score other signers' questioned genuines as impostor trials.
  bool include_random_forgeries = false;
};

struct ScoredTrial {
  std::string signer_id;     // claimed identity
  std::string signature_id;  // questioned sample (impostor ids are prefixed
                             // with their true signer: "w003/g07")
  Label true_label = Label::Unknown;
  double forgery_score = 0.0;
};

struct ProtocolRun {
  std::vector<ScoredTrial> trials;
  std::vector<std::string> skipped_signers;  // too few genuines for the mode
};

struct CurvePoint {
  double tau = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct ErrorCurve {
  std::vector<CurvePoint> points;  // tau ascending
};

enum class EerMethod { ExactCrossing, LinearInterpolation };

struct EerResult {
  double eer = 0.0;
  double tau_star = 0.0;
  EerMethod method = EerMethod::ExactCrossing;
};

/// Runs a verification protocol over a dataset: per signer, the first N
/// genuine signatures (by signature_id order) enroll as references and every
/// remaining genuine plus every forgery is scored against them. Signers with
/// fewer than N genuines are skipped and reported. Throws NoEligibleSigners
/// when nobody qualifies.
ProtocolRun run_protocol(const DatasetManifest& dataset,
                         const ProtocolSpec& spec,
                         const PreprocessConfig& pre_cfg,
                         const DtwConfig& dtw_cfg, const KnnConfig& knn_cfg,
                         const std::optional<GlobalCalibration>& fallback = {},
                         std::size_t jobs = 1);

/// FAR/FRR step functions swept over the distinct observed scores plus
/// {0, 1}. Accept iff forgery_score < tau, so FAR(tau) = fraction of forged
/// trials below tau and FRR(tau) = fraction of genuine trials at or above.
ErrorCurve far_frr_curve(const std::vector<ScoredTrial>& trials);

/// Equal error rate: the smallest sweep point with FAR == FRR if one exists,
/// otherwise the linear interpolation between the adjacent sweep points
/// where FAR - FRR changes sign.
EerResult compute_eer(const ErrorCurve& curve);

/// Configuration echo embedded into the summary report.
struct RunSettings {
  PreprocessConfig preprocess;
  DtwConfig dtw;
  KnnConfig knn;
  ProtocolSpec protocol;
};

/// Writes trials.csv, curve.csv and summary.json under out_dir (created if
/// needed). Output is byte-deterministic for identical inputs.
void export_results(const ProtocolRun& run, const ErrorCurve& curve,
                    const EerResult& eer, const RunSettings& settings,
                    const std::filesystem::path& out_dir);

}  // namespace sigverify

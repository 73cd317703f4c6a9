#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sigverify/dtw.hpp"
#include "sigverify/errors.hpp"
#include "sigverify/preprocess.hpp"
#include "sigverify/sigdata.hpp"

namespace sigverify {

struct KnnConfig {
  std::size_t k = 3;          // neighbors entering the threshold mean
  double theta = 1.5;         // forged/genuine threshold ratio
  double s = 1.0;             // scale on the forged threshold
  double decision_tau = 0.5;  // accept iff forgery_score < tau
};

enum class ThresholdSource { WriterLocal, GlobalFallback };

/// Genuine/forged decision thresholds. base is the k-NN mean distance the
/// thresholds derive from: g_th = base, f_th = theta * base.
struct Thresholds {
  double g_th = 0.0;
  double f_th = 0.0;
  double base = 0.0;
  ThresholdSource source = ThresholdSource::WriterLocal;
};

enum class Decision { Genuine, Forged };

std::string_view to_string(Decision d) noexcept;

struct ComparisonResult {
  double d_s = 0.0;           // distance to the nearest reference
  std::size_t nn_index = 0;   // which reference is nearest
  double p_q = 0.0;           // prediction value, 1 at d_s = g_th
  double forgery_score = 0.0; // 1 - p_q clamped to [0,1]; 0 = genuine
  double forgery_score_raw = 0.0;  // unclamped complement of p_q
  Decision decision = Decision::Forged;
  Thresholds thresholds;
};

/// Writer-independent fallback threshold base, estimated on a development
/// set: the mean genuine nearest-neighbor distance pooled over signers.
struct GlobalCalibration {
  double global_base = 0.0;
  std::size_t pooled_values = 0;
};

/// A signer's enrolled references with their pairwise distances cached.
/// Immutable after build; scoring against it is read-only.
class ReferenceSet {
public:
  ReferenceSet(std::string signer_id, std::vector<FeatureSeries> references,
               std::vector<double> pairwise, DtwConfig dtw_cfg)
      : signer_id_(std::move(signer_id)),
        references_(std::move(references)),
        pairwise_(std::move(pairwise)),
        dtw_cfg_(dtw_cfg) {}

  const std::string& signer_id() const noexcept { return signer_id_; }
  std::size_t size() const noexcept { return references_.size(); }
  const std::vector<FeatureSeries>& references() const noexcept {
    return references_;
  }
  const DtwConfig& dtw_config() const noexcept { return dtw_cfg_; }

  double pairwise(std::size_t i, std::size_t j) const {
    return pairwise_[i * references_.size() + j];
  }

private:
  std::string signer_id_;
  std::vector<FeatureSeries> references_;
  std::vector<double> pairwise_;  // size() x size(), symmetric, zero diagonal
  DtwConfig dtw_cfg_;
};

/// Computes and caches the pairwise distance matrix among the references.
/// Throws EmptyReferenceSet when refs is empty.
ReferenceSet build_reference_set(std::string signer_id,
                                 std::vector<FeatureSeries> refs,
                                 const DtwConfig& dtw_cfg = {});

/// Mean of the K smallest cached distances from reference nn_index to the
/// other references; K is clamped to size()-1. Needs at least 2 references.
double knn_mean_distance(const ReferenceSet& rs, std::size_t nn_index,
                         std::size_t k);

/// Derives thresholds anchored at the questioned signature's nearest
/// reference. Single-reference sets fall back to the global calibration.
/// Throws DegenerateThresholds when s*f_th <= g_th (zero or negative score
/// denominator, e.g. duplicate references).
Thresholds compute_thresholds(const ReferenceSet& rs, const KnnConfig& cfg,
                              std::size_t question_nn_index,
                              const std::optional<GlobalCalibration>& fallback);

/// The prediction algebra alone, for a known nearest-neighbor distance:
///   p_q = (s*f_th - d_s) / (s*f_th - g_th)
/// forgery_score = 1 - p_q, clamped to [0,1]; genuine iff score < tau.
ComparisonResult prediction_from_distance(double d_s, const Thresholds& th,
                                          const KnnConfig& cfg);

/// Full scoring of a questioned series: nearest-reference search, threshold
/// derivation, prediction. Ties on distance go to the lowest index.
ComparisonResult score(const FeatureSeries& question, const ReferenceSet& rs,
                       const KnnConfig& cfg,
                       const std::optional<GlobalCalibration>& fallback = {});

/// Estimates the global fallback base on a development manifest: for every
/// signer with >= 2 genuine signatures, each genuine signature contributes
/// its nearest-neighbor distance among the signer's other genuines; the
/// result is the mean over all contributions. Throws InsufficientData when
/// no signer qualifies.
GlobalCalibration calibrate_global(const DatasetManifest& dev,
                                   const PreprocessConfig& pre_cfg,
                                   const DtwConfig& dtw_cfg,
                                   std::size_t jobs = 1);

/// The pooling rule behind calibrate_global, exposed for direct use: takes
/// per-signer lists of already-preprocessed genuine series.
GlobalCalibration pool_nn_distances(
    const std::vector<std::vector<FeatureSeries>>& genuine_per_signer,
    const DtwConfig& dtw_cfg, std::size_t jobs = 1);

}  // namespace sigverify

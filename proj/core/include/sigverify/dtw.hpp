#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sigverify/errors.hpp"
#include "sigverify/preprocess.hpp"

namespace sigverify {

struct DtwConfig {
  /// Sakoe-Chiba band half-width around the length-normalized diagonal, in
  /// cells. Absent = unconstrained.
  std::optional<std::size_t> band_radius;
  bool normalize_by_length = true;
};

struct DtwResult {
  double raw_distance = 0.0;
  double normalized_distance = 0.0;  // raw / (len(A) + len(B))
  std::size_t path_length = 0;       // cells on the optimal path
};

/// Euclidean distance between two feature vectors of equal dimensionality.
double local_distance(std::span<const double> a, std::span<const double> b);

/// Exact DTW distance: minimum over all monotone alignment paths (diagonal /
/// vertical / horizontal steps from (1,1) to (n,m)) of the summed local
/// Euclidean cost. Uses a two-row rolling DP. Throws InfeasibleBand when the
/// band admits no path.
DtwResult dtw_distance(const FeatureSeries& a, const FeatureSeries& b,
                       const DtwConfig& cfg = {});

/// Test oracle: exhaustively enumerates every monotone alignment path and
/// returns the minimum summed cost. Only meant for tiny series; throws
/// SeriesTooLong above 7 points.
double dtw_bruteforce_oracle(const FeatureSeries& a, const FeatureSeries& b);

/// The distance downstream scoring consumes: normalized unless the config
/// turns normalization off.
inline double scoring_distance(const DtwResult& r, const DtwConfig& cfg) {
  return cfg.normalize_by_length ? r.normalized_distance : r.raw_distance;
}

}  // namespace sigverify

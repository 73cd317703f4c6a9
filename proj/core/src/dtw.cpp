#include "sigverify/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace sigverify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const FeatureSeries& a, const FeatureSeries& b) {
  if (a.empty() || b.empty()) {
    throw Error(Errc::InvalidConfig, "DTW needs non-empty series");
  }
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

struct Cell {
  double cost = kInf;
  std::size_t len = 0;
};

}  // namespace

double local_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

DtwResult dtw_distance(const FeatureSeries& a, const FeatureSeries& b,
                       const DtwConfig& cfg) {
  check_pair(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  // Sakoe-Chiba band around the length-normalized diagonal: row i admits
  // columns within band_radius cells of i*(m-1)/(n-1). Both corners always
  // lie inside. When either series is a single point the only path runs
  // along that row/column, so the band never excludes anything.
  const auto window = [&](std::size_t i) -> std::pair<std::size_t, std::size_t> {
    if (!cfg.band_radius || n == 1 || m == 1) return {0, m - 1};
    const double r = static_cast<double>(*cfg.band_radius);
    const double center = static_cast<double>(i) * static_cast<double>(m - 1) /
                          static_cast<double>(n - 1);
    const double lo_d = std::ceil(center - r);
    const double hi_d = std::floor(center + r);
    const std::size_t lo = lo_d <= 0.0 ? 0 : static_cast<std::size_t>(lo_d);
    if (hi_d < static_cast<double>(lo)) return {1, 0};  // empty window
    const std::size_t hi = hi_d >= static_cast<double>(m - 1)
                               ? m - 1
                               : static_cast<std::size_t>(hi_d);
    return {lo, hi};
  };

  std::vector<Cell> prev(m), cur(m);

  {
    const auto [lo, hi] = window(0);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == 0) {
        prev[0] = {local_distance(a.point(0), b.point(0)), 1};
      } else if (prev[j - 1].cost != kInf) {
        prev[j] = {prev[j - 1].cost + local_distance(a.point(0), b.point(j)),
                   prev[j - 1].len + 1};
      }
    }
  }

  for (std::size_t i = 1; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), Cell{});
    const auto [lo, hi] = window(i);
    for (std::size_t j = lo; j <= hi; ++j) {
      // Predecessor preference on exact cost ties: diagonal, vertical,
      // horizontal. Only the reported path_length depends on this order.
      Cell best = (j > 0) ? prev[j - 1] : Cell{};
      if (prev[j].cost < best.cost) best = prev[j];
      if (j > 0 && cur[j - 1].cost < best.cost) best = cur[j - 1];
      if (best.cost != kInf) {
        cur[j] = {best.cost + local_distance(a.point(i), b.point(j)),
                  best.len + 1};
      }
    }
    std::swap(prev, cur);
  }

  const Cell& corner = prev[m - 1];
  if (corner.cost == kInf) {
    throw Error(Errc::InfeasibleBand,
                "band radius " +
                    std::to_string(cfg.band_radius ? *cfg.band_radius : 0) +
                    " admits no path for lengths " + std::to_string(n) +
                    " x " + std::to_string(m));
  }

  DtwResult result;
  result.raw_distance = corner.cost;
  result.normalized_distance = corner.cost / static_cast<double>(n + m);
  result.path_length = corner.len;
  return result;
}

namespace {

void enumerate_paths(const FeatureSeries& a, const FeatureSeries& b,
                     std::size_t i, std::size_t j, double acc, double& best) {
  if (i + 1 == a.size() && j + 1 == b.size()) {
    if (acc < best) best = acc;
    return;
  }
  if (i + 1 < a.size() && j + 1 < b.size()) {
    enumerate_paths(a, b, i + 1, j + 1,
                    acc + local_distance(a.point(i + 1), b.point(j + 1)), best);
  }
  if (i + 1 < a.size()) {
    enumerate_paths(a, b, i + 1, j,
                    acc + local_distance(a.point(i + 1), b.point(j)), best);
  }
  if (j + 1 < b.size()) {
    enumerate_paths(a, b, i, j + 1,
                    acc + local_distance(a.point(i), b.point(j + 1)), best);
  }
}

}  // namespace

double dtw_bruteforce_oracle(const FeatureSeries& a, const FeatureSeries& b) {
  check_pair(a, b);
  if (a.size() > 7 || b.size() > 7) {
    throw Error(Errc::SeriesTooLong,
                "oracle limited to 7 points, got " + std::to_string(a.size()) +
                    " x " + std::to_string(b.size()));
  }
  double best = kInf;
  enumerate_paths(a, b, 0, 0, local_distance(a.point(0), b.point(0)), best);
  return best;
}

}  // namespace sigverify

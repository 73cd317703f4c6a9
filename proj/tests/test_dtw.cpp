#include "sigverify/dtw.hpp"

#include <cmath>

#include "doctest.h"
#include "sigverify/rng.hpp"
#include "test_util.hpp"

using namespace sigverify;
using testutil::error_code_of;
using testutil::make_series;
using testutil::random_series;

TEST_CASE("local_distance is the Euclidean vector distance") {
  const std::vector<double> a{0.0, 0.0, 0.0};
  const std::vector<double> b{3.0, 4.0, 0.0};
  CHECK(local_distance(a, b) == 5.0);
  CHECK(local_distance(b, b) == 0.0);

  const std::vector<double> two{1.0, 2.0};
  CHECK(error_code_of([&] { (void)local_distance(two, a); }) ==
        Errc::DimensionMismatch);
}

TEST_CASE("dtw_distance on identical series is zero") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const FeatureSeries a = random_series(rng, 1 + rep % 7, 3, -1.0, 1.0);
    const DtwResult r = dtw_distance(a, a, {});
    CHECK(r.raw_distance == 0.0);
    CHECK(r.normalized_distance == 0.0);
    CHECK(r.path_length >= a.size());
  }
}

TEST_CASE("dtw_distance of two singletons is their local distance") {
  const FeatureSeries a = make_series({{0.0, 0.0, 0.0}});
  const FeatureSeries b = make_series({{3.0, 4.0, 0.0}});
  const DtwResult r = dtw_distance(a, b, {});
  CHECK(r.raw_distance == 5.0);
  CHECK(r.normalized_distance == 2.5);  // 5 / (1 + 1)
  CHECK(r.path_length == 1);
}

TEST_CASE("dtw_distance matches the hand-checked 1-D example") {
  // [0,1,2] vs [0,2]: the middle 1 aligns to either endpoint at cost 1.
  const FeatureSeries a = make_series({{0.0}, {1.0}, {2.0}});
  const FeatureSeries b = make_series({{0.0}, {2.0}});
  const DtwResult r = dtw_distance(a, b, {});
  CHECK(r.raw_distance == 1.0);
  CHECK(r.raw_distance == dtw_bruteforce_oracle(a, b));
  CHECK(r.normalized_distance == 1.0 / 5.0);
}

TEST_CASE("dtw_distance validates its inputs") {
  const FeatureSeries a = make_series({{0.0, 0.0}});
  const FeatureSeries b3 = make_series({{0.0, 0.0, 0.0}});
  CHECK(error_code_of([&] { dtw_distance(a, b3, {}); }) ==
        Errc::DimensionMismatch);
  CHECK(error_code_of([&] { dtw_distance(a, FeatureSeries{}, {}); }) ==
        Errc::InvalidConfig);
}

TEST_CASE("oracle equivalence over random series") {
  // Exhaustive-path oracle against the DP, 1000 random pairs.
  Rng rng(20240601);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t m = 1 + rng.below(6);
    const FeatureSeries a = random_series(rng, n, 3, -1.0, 1.0);
    const FeatureSeries b = random_series(rng, m, 3, -1.0, 1.0);
    const double dp = dtw_distance(a, b, {}).raw_distance;
    const double oracle = dtw_bruteforce_oracle(a, b);
    worst = std::max(worst, std::abs(dp - oracle));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("oracle rejects series above its length limit") {
  Rng rng(7);
  const FeatureSeries big = random_series(rng, 8, 3, -1.0, 1.0);
  const FeatureSeries ok = random_series(rng, 3, 3, -1.0, 1.0);
  CHECK(error_code_of([&] { dtw_bruteforce_oracle(big, ok); }) ==
        Errc::SeriesTooLong);
  CHECK(dtw_bruteforce_oracle(ok, ok) == 0.0);
}

TEST_CASE("dtw_distance is symmetric") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const FeatureSeries a = random_series(rng, 1 + rng.below(10), 3, -1, 1);
    const FeatureSeries b = random_series(rng, 1 + rng.below(10), 3, -1, 1);
    const DtwResult ab = dtw_distance(a, b, {});
    const DtwResult ba = dtw_distance(b, a, {});
    CHECK(ab.raw_distance == ba.raw_distance);
    CHECK(ab.normalized_distance == ba.normalized_distance);
  }
}

TEST_CASE("normalized distance and path length invariants") {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t m = 1 + rng.below(12);
    const FeatureSeries a = random_series(rng, n, 3, -1, 1);
    const FeatureSeries b = random_series(rng, m, 3, -1, 1);
    const DtwResult r = dtw_distance(a, b, {});
    CHECK(r.raw_distance >= 0.0);
    CHECK(r.normalized_distance ==
          r.raw_distance / static_cast<double>(n + m));
    CHECK(r.path_length >= std::max(n, m));
    CHECK(r.path_length <= n + m - 1);
  }
}

TEST_CASE("shrinking the band never decreases the distance") {
  Rng rng(31337);
  for (int rep = 0; rep < 50; ++rep) {
    const FeatureSeries a = random_series(rng, 4 + rng.below(9), 3, -1, 1);
    const FeatureSeries b = random_series(rng, 4 + rng.below(9), 3, -1, 1);
    const double unconstrained = dtw_distance(a, b, {}).raw_distance;
    double previous = unconstrained;
    for (std::size_t radius : {12, 6, 3, 2, 1}) {
      DtwConfig cfg;
      cfg.band_radius = radius;
      double banded;
      try {
        banded = dtw_distance(a, b, cfg).raw_distance;
      } catch (const Error& e) {
        CHECK(e.code() == Errc::InfeasibleBand);
        break;  // even tighter bands stay infeasible
      }
      CHECK(banded >= unconstrained);
      CHECK(banded >= previous);
      previous = banded;
    }
  }
}

TEST_CASE("a band too narrow for the length gap is rejected") {
  Rng rng(1);
  const FeatureSeries a = random_series(rng, 3, 3, -1, 1);
  const FeatureSeries b = random_series(rng, 2, 3, -1, 1);
  DtwConfig cfg;
  cfg.band_radius = 0;  // row 1 centers at column 0.5: no admissible cell
  CHECK(error_code_of([&] { dtw_distance(a, b, cfg); }) ==
        Errc::InfeasibleBand);

  // A single-point series is never excluded by the band.
  const FeatureSeries one = random_series(rng, 1, 3, -1, 1);
  CHECK_NOTHROW(dtw_distance(one, b, cfg));
}

TEST_CASE("banded result equals unconstrained when the band covers the grid") {
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const FeatureSeries a = random_series(rng, 1 + rng.below(8), 3, -1, 1);
    const FeatureSeries b = random_series(rng, 1 + rng.below(8), 3, -1, 1);
    DtwConfig wide;
    wide.band_radius = 32;
    CHECK(dtw_distance(a, b, wide).raw_distance ==
          dtw_distance(a, b, {}).raw_distance);
  }
}

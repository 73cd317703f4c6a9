#include "sigverify/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sigverify/rng.hpp"
#include "test_util.hpp"

using namespace sigverify;
using testutil::error_code_of;

namespace {

Signature stylus_with_pressures(std::initializer_list<double> pressures) {
  Signature sig;
  sig.modality = Modality::Stylus;
  sig.signer_id = "w";
  sig.signature_id = "s";
  double t = 0.0;
  for (double p : pressures) {
    sig.samples.push_back({t, t * 2.0, t * 3.0, p, {}, {}});
    t += 10.0;
  }
  return sig;
}

}  // namespace

TEST_CASE("filter_low_pressure keeps only stylus samples above the floor") {
  const Signature sig = stylus_with_pressures({0.0, 512.0, 0.0, 300.0});
  const Signature kept = filter_low_pressure(sig, {});
  REQUIRE(kept.samples.size() == 2);
  CHECK(kept.samples[0].p == 512.0);
  CHECK(kept.samples[1].p == 300.0);

  PreprocessConfig raised;
  raised.pressure_floor = 400.0;
  CHECK(filter_low_pressure(sig, raised).samples.size() == 1);
}

TEST_CASE("finger signatures pass the filter unchanged") {
  Signature sig = stylus_with_pressures({0.0, 0.0, 0.0});
  sig.modality = Modality::Finger;
  const Signature kept = filter_low_pressure(sig, {});
  CHECK(kept.samples.size() == 3);
  CHECK(kept == sig);
}

TEST_CASE("filtering everything is an error") {
  const Signature sig = stylus_with_pressures({0.0, 0.0});
  CHECK(error_code_of([&] { filter_low_pressure(sig, {}); }) ==
        Errc::EmptyAfterFilter);
}

TEST_CASE("minmax_scale maps observed extrema onto the target range") {
  const std::vector<double> a{0.0, 5.0, 10.0};
  CHECK(minmax_scale(a, {0.0, 1.0, 0.0, 10.0}) ==
        std::vector<double>{0.0, 0.5, 1.0});

  const std::vector<double> b{-2.0, 0.0, 2.0};
  CHECK(minmax_scale(b, {0.0, 1.0, -2.0, 2.0}) ==
        std::vector<double>{0.0, 0.5, 1.0});

  // Constant channel: mid-range, no division by the zero spread.
  const std::vector<double> c{7.0, 7.0, 7.0};
  CHECK(minmax_scale(c, {0.0, 1.0, 7.0, 7.0}) ==
        std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("center_translate shifts the mean to zero") {
  CHECK(center_translate(std::vector<double>{0.0, 0.5, 1.0}) ==
        std::vector<double>{-0.5, 0.0, 0.5});
  CHECK(center_translate(std::vector<double>{0.3}) ==
        std::vector<double>{0.0});
  CHECK(center_translate(std::vector<double>{-1.0, 0.0, 1.0}) ==
        std::vector<double>{-1.0, 0.0, 1.0});
}

TEST_CASE("pipeline applies filter, scaling and centering in order") {
  Signature sig;
  sig.modality = Modality::Stylus;
  sig.samples = {{0.0, 0.0, 0.0, 100.0, {}, {}},
                 {10.0, 10.0, 10.0, 300.0, {}, {}}};
  const FeatureSeries series = preprocess_pipeline(sig, {});
  REQUIRE(series.size() == 2);
  REQUIRE(series.dim() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(series.point(0)[c] == -0.5);
    CHECK(series.point(1)[c] == 0.5);
  }
  CHECK(series.channel_names() == std::vector<std::string>{"x", "y", "p"});
}

TEST_CASE("all-zero finger pressure becomes a constant zero channel") {
  Signature sig;
  sig.modality = Modality::Finger;
  sig.samples = {{0.0, 0.0, 5.0, 0.0, {}, {}},
                 {10.0, 10.0, 6.0, 0.0, {}, {}},
                 {20.0, 3.0, 7.0, 0.0, {}, {}}};
  const FeatureSeries series = preprocess_pipeline(sig, {});
  REQUIRE(series.size() == 3);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(series.point(i)[2] == 0.0);  // scaled to 0.5, centered to 0
  }
}

TEST_CASE("pipeline output length equals the filtered sample count") {
  const Signature sig = stylus_with_pressures({0.0, 512.0, 0.0, 300.0, 100.0});
  CHECK(preprocess_pipeline(sig, {}).size() == 3);
}

TEST_CASE("feature combination selects and orders channels") {
  Signature sig;
  sig.samples = {{0.0, 1.0, 4.0, 100.0, {}, {}}, {10.0, 2.0, 9.0, 300.0, {}, {}}};
  PreprocessConfig cfg;
  cfg.feature_combination = {Channel::Pressure, Channel::X};
  const FeatureSeries series = preprocess_pipeline(sig, cfg);
  CHECK(series.dim() == 2);
  CHECK(series.channel_names() == std::vector<std::string>{"p", "x"});

  PreprocessConfig bad;
  bad.feature_combination = {Channel::X, Channel::X};
  CHECK(error_code_of([&] { preprocess_pipeline(sig, bad); }) ==
        Errc::InvalidConfig);
}

TEST_CASE("scaled channels attain the range endpoints and center to zero") {
  Rng rng(424242);
  PreprocessConfig cfg;
  cfg.center_after_scale = false;
  for (int rep = 0; rep < 200; ++rep) {
    const Signature sig = testutil::random_signature(rng, 2 + rng.below(60));
    const FeatureSeries scaled = preprocess_pipeline(sig, cfg);
    for (std::size_t c = 0; c < scaled.dim(); ++c) {
      double lo = scaled.point(0)[c], hi = scaled.point(0)[c];
      for (std::size_t i = 1; i < scaled.size(); ++i) {
        lo = std::min(lo, scaled.point(i)[c]);
        hi = std::max(hi, scaled.point(i)[c]);
      }
      if (lo != hi) {  // non-constant channel
        CHECK(lo == 0.0);
        CHECK(hi == 1.0);
      }
    }

    const FeatureSeries centered = preprocess_pipeline(sig, {});
    for (std::size_t c = 0; c < centered.dim(); ++c) {
      double sum = 0.0, peak = 0.0;
      for (std::size_t i = 0; i < centered.size(); ++i) {
        sum += centered.point(i)[c];
        peak = std::max(peak, std::abs(centered.point(i)[c]));
      }
      const double mean = sum / static_cast<double>(centered.size());
      CHECK(std::abs(mean) <= 1e-9 * std::max(1.0, peak));
    }
  }
}

TEST_CASE("pipeline is affine-invariant in x and y") {
  Rng rng(777);
  for (int rep = 0; rep < 100; ++rep) {
    const Signature sig = testutil::random_signature(rng, 2 + rng.below(40));
    const double a = rng.uniform(0.1, 10.0);
    const double bx = rng.uniform(-500.0, 500.0);
    const double by = rng.uniform(-500.0, 500.0);

    Signature transformed = sig;
    for (auto& s : transformed.samples) {
      s.x = a * s.x + bx;
      s.y = a * s.y + by;
    }

    const FeatureSeries base = preprocess_pipeline(sig, {});
    const FeatureSeries moved = preprocess_pipeline(transformed, {});
    REQUIRE(base.size() == moved.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (std::size_t c = 0; c < base.dim(); ++c) {
        CHECK(std::abs(base.point(i)[c] - moved.point(i)[c]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("pipeline is a pure function") {
  Rng rng(3);
  const Signature sig = testutil::random_signature(rng, 30);
  const FeatureSeries first = preprocess_pipeline(sig, {});
  const FeatureSeries second = preprocess_pipeline(sig, {});
  CHECK(first == second);  // bit-identical values
}

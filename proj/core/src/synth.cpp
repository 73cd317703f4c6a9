#include "sigverify/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <system_error>

#include "sigverify/rng.hpp"

namespace sigverify {

namespace {

// Stream tags separating the writer-shape, genuine-instance and
// forgery-instance random streams derived from the dataset seed.
constexpr std::uint64_t kWriterStream = 0x7772697465727321ULL;
constexpr std::uint64_t kGenuineStream = 0x67656e75696e6521ULL;
constexpr std::uint64_t kForgeryStream = 0x666f726765727921ULL;

constexpr double kSpan = 500.0;        // nominal device-unit extent
constexpr double kSampleEveryMs = 10;  // 100 Hz capture
constexpr int kWarpHarmonics = 3;

constexpr double kPi = std::numbers::pi;

double harmonic_sum(const std::vector<double>& amp,
                    const std::vector<double>& phase, double u) {
  double v = 0.0;
  for (std::size_t h = 0; h < amp.size(); ++h) {
    v += amp[h] * std::sin(2.0 * kPi * static_cast<double>(h + 1) * u +
                           phase[h]);
  }
  return v;
}

/// Smooth monotone warp of [0,1] onto itself. The sine amplitudes are sized
/// so the derivative stays within 1 +- strength, hence monotone for
/// strength < 1.
struct TimeWarp {
  std::array<double, kWarpHarmonics> coeff{};
  double strength = 0.0;

  static TimeWarp draw(Rng& rng, double strength) {
    TimeWarp w;
    w.strength = strength;
    for (double& c : w.coeff) c = rng.uniform(-1.0, 1.0);
    return w;
  }

  double operator()(double u) const {
    double v = u;
    for (int k = 1; k <= kWarpHarmonics; ++k) {
      const double amp =
          strength / (kPi * static_cast<double>(k) * kWarpHarmonics);
      v += coeff[k - 1] * amp * std::sin(kPi * static_cast<double>(k) * u);
    }
    return v;
  }
};

Signature sample_instance(const WriterBase& shape, Rng& rng,
                          const SynthParams& params, Label label) {
  const TimeWarp warp = TimeWarp::draw(rng, params.warp_strength);
  const double scale =
      rng.uniform(1.0 - params.scale_amplitude, 1.0 + params.scale_amplitude);
  const double offset_x =
      rng.uniform(-1.0, 1.0) * params.offset_amplitude * kSpan;
  const double offset_y =
      rng.uniform(-1.0, 1.0) * params.offset_amplitude * kSpan;
  const double jitter = params.jitter_sigma * kSpan;

  Signature sig;
  sig.modality = params.modality;
  sig.label = label;
  sig.samples.reserve(shape.n_points);
  const double step = 1.0 / static_cast<double>(shape.n_points - 1);
  for (std::size_t i = 0; i < shape.n_points; ++i) {
    const double u = warp(static_cast<double>(i) * step);
    SignatureSample s;
    s.t = static_cast<double>(i) * kSampleEveryMs;
    s.x = scale * (shape.x_at(u) + rng.normal(0.0, jitter)) + offset_x;
    s.y = scale * (shape.y_at(u) + rng.normal(0.0, jitter)) + offset_y;
    s.p = shape.p_at(u);
    sig.samples.push_back(s);
  }
  return sig;
}

std::string zero_padded(char prefix, std::size_t value) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%03zu", prefix, value);
  return buf;
}

}  // namespace

void validate(const SynthParams& p) {
  if (p.n_writers < 1) {
    throw Error(Errc::InvalidConfig, "n_writers must be >= 1");
  }
  if (p.genuine_per_writer < 1) {
    throw Error(Errc::InvalidConfig, "genuine_per_writer must be >= 1");
  }
  if (p.base_harmonics < 1) {
    throw Error(Errc::InvalidConfig, "base_harmonics must be >= 1");
  }
  if (p.base_points < 2) {
    throw Error(Errc::InvalidConfig, "base_points must be >= 2");
  }
  if (p.jitter_sigma < 0.0 || p.forgery_distortion < 0.0 ||
      p.offset_amplitude < 0.0) {
    throw Error(Errc::InvalidConfig, "strengths must be >= 0");
  }
  if (p.warp_strength < 0.0 || p.warp_strength >= 1.0) {
    throw Error(Errc::InvalidConfig,
                "warp_strength must lie in [0, 1) to keep the warp monotone");
  }
  if (p.scale_amplitude < 0.0 || p.scale_amplitude >= 1.0) {
    throw Error(Errc::InvalidConfig, "scale_amplitude must lie in [0, 1)");
  }
  // A forger is expected to be noisier than the signer's own variation;
  // distortion 0 is the deliberate degenerate case (indistinguishable
  // forgeries) and is exempt.
  if (p.forgery_distortion > 0.0 &&
      !(p.jitter_sigma < p.forgery_distortion)) {
    throw Error(Errc::InvalidConfig,
                "jitter_sigma must be < forgery_distortion");
  }
}

double WriterBase::x_at(double u) const {
  return span * harmonic_sum(amp_x, phase_x, u);
}

double WriterBase::y_at(double u) const {
  return span * harmonic_sum(amp_y, phase_y, u);
}

double WriterBase::p_at(double u) const {
  if (modality == Modality::Finger) return 0.0;
  return pressure_floor + pressure_swell * std::sin(kPi * u);
}

std::vector<std::array<double, 3>> WriterBase::trajectory() const {
  std::vector<std::array<double, 3>> points;
  points.reserve(n_points);
  const double step = 1.0 / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double u = static_cast<double>(i) * step;
    points.push_back({x_at(u), y_at(u), p_at(u)});
  }
  return points;
}

WriterBase generate_writer_base(std::uint64_t seed, std::size_t writer_index,
                                const SynthParams& params) {
  validate(params);
  Rng rng(derive_seed(seed, kWriterStream, writer_index));

  WriterBase base;
  base.modality = params.modality;
  base.n_points = params.base_points;
  base.span = kSpan;

  const auto harmonics = static_cast<std::size_t>(params.base_harmonics);
  auto draw_axis = [&](std::vector<double>& amp, std::vector<double>& phase) {
    amp.resize(harmonics);
    phase.resize(harmonics);
    for (std::size_t h = 0; h < harmonics; ++h) {
      // Decaying amplitudes keep the loops smooth rather than scribbly.
      amp[h] = rng.uniform(0.4, 1.2) / static_cast<double>(h + 1);
      phase[h] = rng.uniform(0.0, 2.0 * kPi);
    }
  };
  draw_axis(base.amp_x, base.phase_x);
  draw_axis(base.amp_y, base.phase_y);

  // Drawn for finger writers too, so the x/y stream does not depend on the
  // modality; p_at simply ignores them.
  base.pressure_floor = rng.uniform(250.0, 450.0);
  base.pressure_swell = rng.uniform(150.0, 350.0);
  return base;
}

Signature sample_genuine(const WriterBase& base, std::uint64_t instance_seed,
                         const SynthParams& params) {
  validate(params);
  Rng rng(instance_seed);
  return sample_instance(base, rng, params, Label::Genuine);
}

Signature sample_forgery(const WriterBase& base, std::uint64_t instance_seed,
                         const SynthParams& params) {
  validate(params);
  Rng rng(instance_seed);

  // The forger reproduces the overall shape with amplitude and phase errors.
  WriterBase distorted = base;
  const double d = params.forgery_distortion;
  auto distort_axis = [&](std::vector<double>& amp, std::vector<double>& phase) {
    for (double& a : amp) a *= 1.0 + d * rng.normal();
    for (double& ph : phase) ph += d * rng.normal();
  };
  distort_axis(distorted.amp_x, distorted.phase_x);
  distort_axis(distorted.amp_y, distorted.phase_y);
  distorted.pressure_swell *= 1.0 + d * rng.normal();
  distorted.pressure_floor =
      std::max(50.0, distorted.pressure_floor * (1.0 + d * rng.normal()));

  return sample_instance(distorted, rng, params, Label::Forged);
}

DatasetManifest generate_dataset(const SynthParams& params,
                                 const std::filesystem::path& out_dir) {
  validate(params);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(Errc::IoError,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  manifest.base_dir = out_dir;

  for (std::size_t w = 0; w < params.n_writers; ++w) {
    const WriterBase base = generate_writer_base(params.seed, w, params);
    const std::string signer = zero_padded('w', w);
    const std::uint64_t writer_tag = static_cast<std::uint64_t>(w) << 32;

    auto emit = [&](Signature sig, const std::string& signature_id) {
      sig.signer_id = signer;
      sig.signature_id = signature_id;
      const std::string filename = signer + "_" + signature_id + ".sig.tsv";
      write_signature_file(sig, out_dir / filename);
      manifest.entries.push_back(ManifestEntry{
          signer, signature_id, sig.label, sig.modality, filename, {}});
    };

    for (std::size_t g = 0; g < params.genuine_per_writer; ++g) {
      emit(sample_genuine(
               base, derive_seed(params.seed, kGenuineStream, writer_tag | g),
               params),
           zero_padded('g', g));
    }
    for (std::size_t f = 0; f < params.skilled_forgeries_per_writer; ++f) {
      emit(sample_forgery(
               base, derive_seed(params.seed, kForgeryStream, writer_tag | f),
               params),
           zero_padded('f', f));
    }
  }

  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace sigverify

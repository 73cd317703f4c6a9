#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/sigdata.hpp"

namespace sigverify {

/// Knobs for the seeded synthetic signature generator. The whole dataset is
/// a pure function of these values.
struct SynthParams {
  std::uint64_t seed = 42;
  std::size_t n_writers = 10;
  std::size_t genuine_per_writer = 10;
  std::size_t skilled_forgeries_per_writer = 10;
  int base_harmonics = 4;
  double jitter_sigma = 0.01;       // additive noise, fraction of span
  double warp_strength = 0.1;       // monotone time-warp amplitude
  double forgery_distortion = 0.35; // shape error a forger makes
  double scale_amplitude = 0.1;     // instance scale drawn from [1-a, 1+a]
  double offset_amplitude = 0.05;   // instance offset, fraction of span
  Modality modality = Modality::Stylus;
  std::size_t base_points = 150;    // ~1.5 s capture at 100 Hz
};

/// Throws InvalidConfig when counts or strengths are out of range.
void validate(const SynthParams& params);

/// A writer's underlying signature shape: per-axis harmonic amplitudes and
/// phases plus a smooth pressure profile. Instances are drawn by warping and
/// perturbing this shape.
struct WriterBase {
  std::vector<double> amp_x, phase_x;
  std::vector<double> amp_y, phase_y;
  double pressure_floor = 0.0;   // profile minimum, device units
  double pressure_swell = 0.0;   // mid-stroke rise
  double span = 0.0;             // nominal trajectory extent, device units
  Modality modality = Modality::Stylus;
  std::size_t n_points = 0;

  /// Trajectory evaluation at curve parameter u in [0, 1].
  double x_at(double u) const;
  double y_at(double u) const;
  double p_at(double u) const;

  /// The undistorted trajectory sampled at n_points: (x, y, p) triples.
  std::vector<std::array<double, 3>> trajectory() const;
};

WriterBase generate_writer_base(std::uint64_t seed, std::size_t writer_index,
                                const SynthParams& params);

/// A genuine instance: smooth monotone time-warp, additive Gaussian jitter
/// and a small uniform scale/offset on x and y. These are exactly the
/// variations the preprocessing stage absorbs.
Signature sample_genuine(const WriterBase& base, std::uint64_t instance_seed,
                         const SynthParams& params);

/// A skilled forgery: the harmonic amplitudes and phases are additionally
/// distorted by forgery_distortion before sampling, modeling a forger who
/// reproduces the overall shape imperfectly.
Signature sample_forgery(const WriterBase& base, std::uint64_t instance_seed,
                         const SynthParams& params);

/// Writes n_writers x (genuine + forged) canonical signature files plus
/// manifest.json under out_dir and returns the manifest.
DatasetManifest generate_dataset(const SynthParams& params,
                                 const std::filesystem::path& out_dir);

}  // namespace sigverify

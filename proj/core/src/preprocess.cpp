#include "sigverify/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace sigverify {

std::string_view to_string(Channel c) noexcept {
  switch (c) {
    case Channel::X: return "x";
    case Channel::Y: return "y";
    case Channel::Pressure: return "p";
  }
  return "?";
}

Channel channel_from_string(std::string_view s) {
  if (s == "x") return Channel::X;
  if (s == "y") return Channel::Y;
  if (s == "p" || s == "pressure") return Channel::Pressure;
  throw Error(Errc::InvalidConfig, "unknown channel '" + std::string(s) + "'");
}

namespace {

void validate(const PreprocessConfig& cfg) {
  if (cfg.pressure_floor < 0.0) {
    throw Error(Errc::InvalidConfig, "pressure_floor must be >= 0");
  }
  if (cfg.feature_combination.empty()) {
    throw Error(Errc::InvalidConfig, "feature_combination must be non-empty");
  }
  std::set<Channel> distinct(cfg.feature_combination.begin(),
                             cfg.feature_combination.end());
  if (distinct.size() != cfg.feature_combination.size()) {
    throw Error(Errc::InvalidConfig, "feature_combination has duplicates");
  }
  if (!(cfg.scale_min < cfg.scale_max)) {
    throw Error(Errc::InvalidConfig, "scale range must satisfy min < max");
  }
}

double channel_value(const SignatureSample& s, Channel c) noexcept {
  switch (c) {
    case Channel::X: return s.x;
    case Channel::Y: return s.y;
    case Channel::Pressure: return s.p;
  }
  return 0.0;
}

}  // namespace

Signature filter_low_pressure(const Signature& sig,
                              const PreprocessConfig& cfg) {
  validate(cfg);
  // Finger captures carry no pressure at all, so the filter would erase them.
  if (sig.modality == Modality::Finger) return sig;

  Signature out = sig;
  out.samples.clear();
  std::copy_if(sig.samples.begin(), sig.samples.end(),
               std::back_inserter(out.samples),
               [&](const SignatureSample& s) { return s.p > cfg.pressure_floor; });
  if (out.samples.empty()) {
    throw Error(Errc::EmptyAfterFilter,
                "no sample above pressure floor " +
                    std::to_string(cfg.pressure_floor));
  }
  return out;
}

std::vector<double> minmax_scale(std::span<const double> channel,
                                 const ScalingParams& params) {
  if (!(params.new_min < params.new_max)) {
    throw Error(Errc::InvalidConfig, "scaling range must satisfy min < max");
  }
  std::vector<double> out(channel.size());
  const double spread = params.old_max - params.old_min;
  if (spread == 0.0) {
    // Constant channel: no spread to rescale, place it mid-range. This is
    // the finger all-zero-pressure case in particular.
    std::fill(out.begin(), out.end(),
              (params.new_min + params.new_max) / 2.0);
    return out;
  }
  const double gain = params.new_max - params.new_min;
  for (std::size_t i = 0; i < channel.size(); ++i) {
    out[i] = params.new_min + (channel[i] - params.old_min) / spread * gain;
  }
  return out;
}

std::vector<double> center_translate(std::span<const double> channel) {
  const double mean =
      std::accumulate(channel.begin(), channel.end(), 0.0) /
      static_cast<double>(channel.size());
  std::vector<double> out(channel.size());
  for (std::size_t i = 0; i < channel.size(); ++i) out[i] = channel[i] - mean;
  return out;
}

FeatureSeries preprocess_pipeline(const Signature& sig,
                                  const PreprocessConfig& cfg) {
  validate(cfg);
  const Signature filtered = filter_low_pressure(sig, cfg);
  const std::size_t n = filtered.samples.size();

  std::vector<std::vector<double>> channels;
  channels.reserve(cfg.feature_combination.size());
  std::vector<std::string> names;
  names.reserve(cfg.feature_combination.size());

  for (Channel c : cfg.feature_combination) {
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = channel_value(filtered.samples[i], c);
    }
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    std::vector<double> scaled = minmax_scale(
        raw, ScalingParams{cfg.scale_min, cfg.scale_max, *lo, *hi});
    channels.push_back(cfg.center_after_scale ? center_translate(scaled)
                                              : std::move(scaled));
    names.emplace_back(to_string(c));
  }

  FeatureSeries series(channels.size(), std::move(names));
  std::vector<double> point(channels.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels.size(); ++c) point[c] = channels[c][i];
    series.push_back(point);
  }
  return series;
}

}  // namespace sigverify

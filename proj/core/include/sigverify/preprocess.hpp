#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/sigdata.hpp"

namespace sigverify {

enum class Channel { X, Y, Pressure };

std::string_view to_string(Channel c) noexcept;
Channel channel_from_string(std::string_view s);  // throws InvalidConfig

/// Min-max rescaling parameters: the target range plus the observed extrema
/// of the channel being rescaled.
struct ScalingParams {
  double new_min = 0.0;
  double new_max = 1.0;
  double old_min = 0.0;
  double old_max = 0.0;
};

struct ChannelStats {
  double mean = 0.0;
};

struct PreprocessConfig {
  double pressure_floor = 0.0;  // keep stylus samples with p > floor
  std::vector<Channel> feature_combination = {Channel::X, Channel::Y,
                                              Channel::Pressure};
  double scale_min = 0.0;
  double scale_max = 1.0;
  bool center_after_scale = true;
};

/// A preprocessed multivariate sequence: n points of dim() values each,
/// stored row-major. This is what the DTW distance consumes.
class FeatureSeries {
public:
  FeatureSeries() = default;
  FeatureSeries(std::size_t dim, std::vector<std::string> channel_names)
      : dim_(dim), channel_names_(std::move(channel_names)) {}

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

  void push_back(std::span<const double> point) {
    values_.insert(values_.end(), point.begin(), point.end());
  }

  const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const FeatureSeries&) const = default;

private:
  std::size_t dim_ = 0;
  std::vector<std::string> channel_names_;
  std::vector<double> values_;
};

/// Drops stylus samples whose pressure is at or below the floor. Finger
/// signatures pass through unchanged (their pressure channel is all zero by
/// construction). Throws EmptyAfterFilter when nothing survives.
Signature filter_low_pressure(const Signature& sig,
                              const PreprocessConfig& cfg);

/// Rescales values into [new_min, new_max] from the observed [old_min,
/// old_max]. A constant channel (old_max == old_min) maps to the midpoint of
/// the target range.
std::vector<double> minmax_scale(std::span<const double> channel,
                                 const ScalingParams& params);

/// Subtracts the channel mean, shifting the center of gravity to zero.
std::vector<double> center_translate(std::span<const double> channel);

/// filter_low_pressure, then per-channel minmax_scale with observed extrema,
/// then per-channel center_translate (when enabled), assembled in
/// feature_combination order.
FeatureSeries preprocess_pipeline(const Signature& sig,
                                  const PreprocessConfig& cfg);

}  // namespace sigverify

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigverify {

/// Error kinds raised across the toolkit. Each maps to one failure mode of a
/// specific operation; tests match on the code rather than the message text.
enum class Errc {
  // sigdata
  MalformedHeader,
  MalformedRow,
  EmptySignature,
  NonMonotoneTimestamps,
  CountMismatch,
  DuplicateEntry,
  MissingFile,
  MalformedManifest,
  // preprocess
  EmptyAfterFilter,
  // dtw
  DimensionMismatch,
  InfeasibleBand,
  SeriesTooLong,
  // knn
  EmptyReferenceSet,
  InsufficientReferences,
  NoFallbackAvailable,
  DegenerateThresholds,
  InsufficientData,
  // eval
  NoEligibleSigners,
  SingleClassOnly,
  NoCrossing,
  // generic
  InvalidConfig,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  Errc code() const noexcept { return code_; }

  /// The message without the code-name prefix, for re-wrapping with context.
  const std::string& message() const noexcept { return message_; }

private:
  Errc code_;
  std::string message_;
};

}  // namespace sigverify

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigverify/errors.hpp"

namespace sigverify {

enum class Modality { Stylus, Finger };
enum class Label { Genuine, Forged, Unknown };

std::string_view to_string(Modality m) noexcept;
std::string_view to_string(Label l) noexcept;
Modality modality_from_string(std::string_view s);  // throws MalformedHeader
Label label_from_string(std::string_view s);        // throws MalformedHeader

/// One captured pen/finger sample. Positions and pressure are in raw device
/// units; azimuth/altitude are pen orientation angles in degrees and are
/// carried through but unused by the verification pipeline.
struct SignatureSample {
  double t = 0.0;  // milliseconds, non-negative
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;  // >= 0; all-zero for finger input
  std::optional<double> azimuth;   // [0, 360)
  std::optional<double> altitude;  // [0, 90]

  bool operator==(const SignatureSample&) const = default;
};

struct Signature {
  std::vector<SignatureSample> samples;  // non-empty, t non-decreasing
  Modality modality = Modality::Stylus;
  std::string signer_id;
  std::string signature_id;
  Label label = Label::Unknown;

  bool operator==(const Signature&) const = default;
};

/// Parses the canonical tab-separated signature format:
///   #key<TAB>value header lines (signer_id, signature_id, modality, label),
///   a column header `t x y p [azimuth altitude]`, then one row per sample.
Signature parse_canonical(std::string_view text);

/// Inverse of parse_canonical. Numbers are written in shortest round-trip
/// decimal form, so parse_canonical(serialize_canonical(s)) == s exactly.
std::string serialize_canonical(const Signature& sig);

/// Parses the SVC2004 competition layout: first line is the point count,
/// then per line `X Y timestamp button-status azimuth altitude pressure`.
/// Button status is discarded. Ids/label/modality are left at defaults; the
/// caller (e.g. the import command) fills them in from out-of-band context.
Signature parse_svc2004(std::string_view text);

struct ManifestEntry {
  std::string signer_id;
  std::string signature_id;
  Label label = Label::Unknown;
  Modality modality = Modality::Stylus;
  std::string path;  // relative paths resolve against the manifest directory
  std::optional<std::string> split;  // "development" | "evaluation"

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  // directory entry paths resolve against

  std::filesystem::path resolve(const ManifestEntry& e) const;
};

/// Reads and validates a manifest JSON file (an array of entry objects).
/// Rejects duplicate (signer_id, signature_id) pairs and entries whose path
/// does not exist on disk.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes a manifest as a JSON array, entries in the given order.
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

/// Reads a file and parses it with parse_canonical. IoError on read failure.
Signature load_signature_file(const std::filesystem::path& path);

void write_signature_file(const Signature& sig,
                          const std::filesystem::path& path);

}  // namespace sigverify

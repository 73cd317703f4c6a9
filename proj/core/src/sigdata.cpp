#include "sigverify/sigdata.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace sigverify {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::EmptySignature: return "EmptySignature";
    case Errc::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::MissingFile: return "MissingFile";
    case Errc::MalformedManifest: return "MalformedManifest";
    case Errc::EmptyAfterFilter: return "EmptyAfterFilter";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InfeasibleBand: return "InfeasibleBand";
    case Errc::SeriesTooLong: return "SeriesTooLong";
    case Errc::EmptyReferenceSet: return "EmptyReferenceSet";
    case Errc::InsufficientReferences: return "InsufficientReferences";
    case Errc::NoFallbackAvailable: return "NoFallbackAvailable";
    case Errc::DegenerateThresholds: return "DegenerateThresholds";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::NoEligibleSigners: return "NoEligibleSigners";
    case Errc::SingleClassOnly: return "SingleClassOnly";
    case Errc::NoCrossing: return "NoCrossing";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

std::string_view to_string(Modality m) noexcept {
  return m == Modality::Stylus ? "stylus" : "finger";
}

std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::Genuine: return "genuine";
    case Label::Forged: return "forged";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

Modality modality_from_string(std::string_view s) {
  if (s == "stylus") return Modality::Stylus;
  if (s == "finger") return Modality::Finger;
  throw Error(Errc::MalformedHeader, "unknown modality '" + std::string(s) + "'");
}

Label label_from_string(std::string_view s) {
  if (s == "genuine") return Label::Genuine;
  if (s == "forged") return Label::Forged;
  if (s == "unknown") return Label::Unknown;
  throw Error(Errc::MalformedHeader, "unknown label '" + std::string(s) + "'");
}

namespace {

// Line iteration tolerating \r\n endings and blank lines.
struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;  // 1-based number of the line last returned

  std::optional<std::string_view> next() {
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view line = (eol == std::string_view::npos)
                                  ? text.substr(pos)
                                  : text.substr(pos, eol - pos);
      pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
      return line;
    }
    return std::nullopt;
  }
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_field(std::string_view token, std::size_t line_no,
                   std::string_view what) {
  auto v = parse_double(token);
  if (!v) {
    throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) +
                                        ": bad " + std::string(what) + " '" +
                                        std::string(token) + "'");
  }
  return *v;
}

void check_sample_ranges(const SignatureSample& s, std::size_t line_no) {
  auto fail = [&](std::string_view what) {
    throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": " +
                                        std::string(what) + " out of range");
  };
  if (s.t < 0.0) fail("timestamp");
  if (s.p < 0.0) fail("pressure");
  if (s.azimuth && (*s.azimuth < 0.0 || *s.azimuth >= 360.0)) fail("azimuth");
  if (s.altitude && (*s.altitude < 0.0 || *s.altitude > 90.0)) fail("altitude");
}

void check_monotone(const Signature& sig, double t, std::size_t line_no) {
  if (!sig.samples.empty() && t < sig.samples.back().t) {
    throw Error(Errc::NonMonotoneTimestamps,
                "line " + std::to_string(line_no) + ": timestamp " +
                    format_double(t) + " after " +
                    format_double(sig.samples.back().t));
  }
}

}  // namespace

Signature parse_canonical(std::string_view text) {
  Signature sig;
  LineReader reader{text};

  bool saw_signer = false, saw_sig_id = false, saw_modality = false,
       saw_label = false;

  // Header block: #key<TAB>value lines until the column header.
  std::optional<std::string_view> line;
  while ((line = reader.next())) {
    if (line->front() != '#') break;
    std::string_view body = line->substr(1);
    std::size_t tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(Errc::MalformedHeader,
                  "line " + std::to_string(reader.line_no) +
                      ": expected #key<TAB>value");
    }
    std::string_view key = body.substr(0, tab);
    std::string_view value = body.substr(tab + 1);
    if (key == "signer_id") {
      sig.signer_id = std::string(value);
      saw_signer = true;
    } else if (key == "signature_id") {
      sig.signature_id = std::string(value);
      saw_sig_id = true;
    } else if (key == "modality") {
      sig.modality = modality_from_string(value);
      saw_modality = true;
    } else if (key == "label") {
      sig.label = label_from_string(value);
      saw_label = true;
    } else {
      throw Error(Errc::MalformedHeader,
                  "line " + std::to_string(reader.line_no) +
                      ": unknown header key '" + std::string(key) + "'");
    }
  }
  if (!saw_signer || !saw_sig_id || !saw_modality || !saw_label) {
    throw Error(Errc::MalformedHeader,
                "missing header key(s); need signer_id, signature_id, "
                "modality, label");
  }

  // Column header row.
  if (!line) throw Error(Errc::EmptySignature, "no column header");
  auto columns = split_fields(*line);
  bool with_orientation;
  if (columns.size() == 4 && columns[0] == "t" && columns[1] == "x" &&
      columns[2] == "y" && columns[3] == "p") {
    with_orientation = false;
  } else if (columns.size() == 6 && columns[0] == "t" && columns[1] == "x" &&
             columns[2] == "y" && columns[3] == "p" &&
             columns[4] == "azimuth" && columns[5] == "altitude") {
    with_orientation = true;
  } else {
    throw Error(Errc::MalformedHeader,
                "line " + std::to_string(reader.line_no) +
                    ": column header must be 't x y p [azimuth altitude]'");
  }

  const std::size_t expected = with_orientation ? 6 : 4;
  while ((line = reader.next())) {
    auto fields = split_fields(*line);
    if (fields.size() != expected) {
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(reader.line_no) + ": expected " +
                      std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()));
    }
    SignatureSample s;
    s.t = parse_field(fields[0], reader.line_no, "timestamp");
    s.x = parse_field(fields[1], reader.line_no, "x");
    s.y = parse_field(fields[2], reader.line_no, "y");
    s.p = parse_field(fields[3], reader.line_no, "pressure");
    if (with_orientation) {
      s.azimuth = parse_field(fields[4], reader.line_no, "azimuth");
      s.altitude = parse_field(fields[5], reader.line_no, "altitude");
    }
    check_sample_ranges(s, reader.line_no);
    check_monotone(sig, s.t, reader.line_no);
    sig.samples.push_back(s);
  }

  if (sig.samples.empty()) throw Error(Errc::EmptySignature, "no data rows");
  return sig;
}

std::string serialize_canonical(const Signature& sig) {
  const bool with_orientation =
      !sig.samples.empty() &&
      std::all_of(sig.samples.begin(), sig.samples.end(), [](const auto& s) {
        return s.azimuth.has_value() && s.altitude.has_value();
      });

  std::string out;
  out.reserve(64 + sig.samples.size() * 32);
  out += "#signer_id\t";
  out += sig.signer_id;
  out += "\n#signature_id\t";
  out += sig.signature_id;
  out += "\n#modality\t";
  out += to_string(sig.modality);
  out += "\n#label\t";
  out += to_string(sig.label);
  out += with_orientation ? "\nt\tx\ty\tp\tazimuth\taltitude\n" : "\nt\tx\ty\tp\n";

  for (const auto& s : sig.samples) {
    out += format_double(s.t);
    out += '\t';
    out += format_double(s.x);
    out += '\t';
    out += format_double(s.y);
    out += '\t';
    out += format_double(s.p);
    if (with_orientation) {
      out += '\t';
      out += format_double(*s.azimuth);
      out += '\t';
      out += format_double(*s.altitude);
    }
    out += '\n';
  }
  return out;
}

Signature parse_svc2004(std::string_view text) {
  LineReader reader{text};

  auto header = reader.next();
  if (!header) throw Error(Errc::EmptySignature, "empty file");
  auto count = parse_int(*header);
  if (!count || *count < 0) {
    throw Error(Errc::MalformedRow,
                "line " + std::to_string(reader.line_no) +
                    ": expected point count, got '" + std::string(*header) +
                    "'");
  }

  Signature sig;
  sig.modality = Modality::Stylus;
  sig.label = Label::Unknown;

  std::optional<std::string_view> line;
  while ((line = reader.next())) {
    auto fields = split_fields(*line);
    // X Y timestamp button-status azimuth altitude pressure
    if (fields.size() != 7) {
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(reader.line_no) +
                      ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    }
    SignatureSample s;
    s.x = parse_field(fields[0], reader.line_no, "x");
    s.y = parse_field(fields[1], reader.line_no, "y");
    s.t = parse_field(fields[2], reader.line_no, "timestamp");
    // fields[3] is the button status; discarded.
    s.azimuth = parse_field(fields[4], reader.line_no, "azimuth");
    s.altitude = parse_field(fields[5], reader.line_no, "altitude");
    s.p = parse_field(fields[6], reader.line_no, "pressure");
    check_sample_ranges(s, reader.line_no);
    check_monotone(sig, s.t, reader.line_no);
    sig.samples.push_back(s);
    if (sig.samples.size() > static_cast<std::size_t>(*count)) {
      throw Error(Errc::CountMismatch,
                  "more data rows than the declared " +
                      std::to_string(*count));
    }
  }

  if (sig.samples.size() != static_cast<std::size_t>(*count)) {
    throw Error(Errc::CountMismatch,
                "declared " + std::to_string(*count) + " rows, found " +
                    std::to_string(sig.samples.size()));
  }
  if (sig.samples.empty()) throw Error(Errc::EmptySignature, "no data rows");
  return sig;
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& e) const {
  std::filesystem::path p(e.path);
  return p.is_absolute() ? p : base_dir / p;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

const nlohmann::json& require_field(const nlohmann::json& obj,
                                    const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(Errc::MalformedManifest,
                "entry " + std::to_string(index) + ": missing string field '" +
                    key + "'");
  }
  return *it;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedManifest, e.what());
  }
  if (!doc.is_array()) {
    throw Error(Errc::MalformedManifest, "top-level value must be an array");
  }

  DatasetManifest manifest;
  manifest.base_dir = path.parent_path();

  std::set<std::pair<std::string, std::string>> seen;
  std::size_t index = 0;
  for (const auto& item : doc) {
    if (!item.is_object()) {
      throw Error(Errc::MalformedManifest,
                  "entry " + std::to_string(index) + ": not an object");
    }
    ManifestEntry e;
    e.signer_id = require_field(item, "signer_id", index).get<std::string>();
    e.signature_id =
        require_field(item, "signature_id", index).get<std::string>();
    e.path = require_field(item, "path", index).get<std::string>();

    const std::string label = require_field(item, "label", index);
    const std::string modality = require_field(item, "modality", index);
    try {
      e.label = label_from_string(label);
      e.modality = modality_from_string(modality);
    } catch (const Error& err) {
      throw Error(Errc::MalformedManifest,
                  "entry " + std::to_string(index) + ": " + err.message());
    }

    if (auto it = item.find("split"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error(Errc::MalformedManifest,
                    "entry " + std::to_string(index) + ": split must be a string");
      }
      const std::string split = *it;
      if (split != "development" && split != "evaluation") {
        throw Error(Errc::MalformedManifest,
                    "entry " + std::to_string(index) + ": unknown split '" +
                        split + "'");
      }
      e.split = split;
    }

    if (!seen.emplace(e.signer_id, e.signature_id).second) {
      throw Error(Errc::DuplicateEntry,
                  "(" + e.signer_id + ", " + e.signature_id + ")");
    }
    manifest.entries.push_back(std::move(e));
    if (!std::filesystem::exists(manifest.resolve(manifest.entries.back()))) {
      throw Error(Errc::MissingFile, manifest.entries.back().path);
    }
    ++index;
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json item = {
        {"signer_id", e.signer_id},
        {"signature_id", e.signature_id},
        {"label", std::string(to_string(e.label))},
        {"modality", std::string(to_string(e.modality))},
        {"path", e.path},
    };
    if (e.split) item["split"] = *e.split;
    doc.push_back(std::move(item));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

Signature load_signature_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_canonical(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_signature_file(const Signature& sig,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << serialize_canonical(sig);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace sigverify

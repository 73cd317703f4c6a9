#include "sigverify/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "config_json.hpp"

namespace sigverify {

std::string_view to_string(ProtocolMode m) noexcept {
  return m == ProtocolMode::OneVsOne ? "1vs1" : "4vs1";
}

ProtocolMode protocol_mode_from_string(std::string_view s) {
  if (s == "1vs1") return ProtocolMode::OneVsOne;
  if (s == "4vs1") return ProtocolMode::FourVsOne;
  throw Error(Errc::InvalidConfig,
              "unknown protocol mode '" + std::string(s) + "'");
}

namespace detail {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const char* section) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(Errc::InvalidConfig, std::string(section) +
                                           ": unknown key '" + key + "'");
    }
  }
}

const json* section(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) {
    throw Error(Errc::InvalidConfig,
                std::string(name) + " section must be an object");
  }
  return &*it;
}

template <typename T>
void read(const json& obj, const char* key, T& out, const char* section_name) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::InvalidConfig, std::string(section_name) + "." + key +
                                         ": wrong type");
  }
}

}  // namespace

json settings_to_json(const RunSettings& s) {
  json combination = json::array();
  for (Channel c : s.preprocess.feature_combination) {
    combination.push_back(std::string(to_string(c)));
  }
  json dtw = {{"normalize_by_length", s.dtw.normalize_by_length}};
  dtw["band_radius"] =
      s.dtw.band_radius ? json(*s.dtw.band_radius) : json(nullptr);
  return json{
      {"preprocess",
       {{"pressure_floor", s.preprocess.pressure_floor},
        {"feature_combination", std::move(combination)},
        {"scale_range", {s.preprocess.scale_min, s.preprocess.scale_max}},
        {"center_after_scale", s.preprocess.center_after_scale}}},
      {"dtw", std::move(dtw)},
      {"knn",
       {{"k", s.knn.k},
        {"theta", s.knn.theta},
        {"s", s.knn.s},
        {"decision_tau", s.knn.decision_tau}}},
      {"protocol",
       {{"mode", std::string(to_string(s.protocol.mode))},
        {"random_forgeries", s.protocol.include_random_forgeries}}},
  };
}

RunSettings settings_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(Errc::InvalidConfig, "config must be a JSON object");
  }
  reject_unknown_keys(doc, {"preprocess", "dtw", "knn", "protocol"}, "config");

  RunSettings s;

  if (const json* pre = section(doc, "preprocess")) {
    reject_unknown_keys(*pre,
                        {"pressure_floor", "feature_combination",
                         "scale_range", "center_after_scale"},
                        "preprocess");
    read(*pre, "pressure_floor", s.preprocess.pressure_floor, "preprocess");
    read(*pre, "center_after_scale", s.preprocess.center_after_scale,
         "preprocess");
    if (auto it = pre->find("feature_combination"); it != pre->end()) {
      if (!it->is_array() || it->empty()) {
        throw Error(Errc::InvalidConfig,
                    "preprocess.feature_combination must be a non-empty array");
      }
      s.preprocess.feature_combination.clear();
      for (const auto& name : *it) {
        if (!name.is_string()) {
          throw Error(Errc::InvalidConfig,
                      "preprocess.feature_combination: entries must be strings");
        }
        s.preprocess.feature_combination.push_back(
            channel_from_string(name.get<std::string>()));
      }
    }
    if (auto it = pre->find("scale_range"); it != pre->end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
          !(*it)[1].is_number()) {
        throw Error(Errc::InvalidConfig,
                    "preprocess.scale_range must be [min, max]");
      }
      s.preprocess.scale_min = (*it)[0].get<double>();
      s.preprocess.scale_max = (*it)[1].get<double>();
    }
  }

  if (const json* dtw = section(doc, "dtw")) {
    reject_unknown_keys(*dtw, {"band_radius", "normalize_by_length"}, "dtw");
    read(*dtw, "normalize_by_length", s.dtw.normalize_by_length, "dtw");
    if (auto it = dtw->find("band_radius"); it != dtw->end()) {
      if (it->is_null()) {
        s.dtw.band_radius.reset();
      } else if (it->is_number_unsigned()) {
        s.dtw.band_radius = it->get<std::size_t>();
      } else {
        throw Error(Errc::InvalidConfig,
                    "dtw.band_radius must be null or a non-negative integer");
      }
    }
  }

  if (const json* knn = section(doc, "knn")) {
    reject_unknown_keys(*knn, {"k", "theta", "s", "decision_tau"}, "knn");
    if (auto it = knn->find("k"); it != knn->end()) {
      if (!it->is_number_unsigned() || it->get<std::size_t>() < 1) {
        throw Error(Errc::InvalidConfig, "knn.k must be a positive integer");
      }
      s.knn.k = it->get<std::size_t>();
    }
    read(*knn, "theta", s.knn.theta, "knn");
    read(*knn, "s", s.knn.s, "knn");
    read(*knn, "decision_tau", s.knn.decision_tau, "knn");
  }

  if (const json* protocol = section(doc, "protocol")) {
    reject_unknown_keys(*protocol, {"mode", "random_forgeries"}, "protocol");
    if (auto it = protocol->find("mode"); it != protocol->end()) {
      if (!it->is_string()) {
        throw Error(Errc::InvalidConfig, "protocol.mode must be a string");
      }
      s.protocol.mode = protocol_mode_from_string(it->get<std::string>());
    }
    read(*protocol, "random_forgeries", s.protocol.include_random_forgeries,
         "protocol");
  }

  return s;
}

}  // namespace detail

RunSettings parse_run_settings(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  return detail::settings_from_json(doc);
}

RunSettings load_run_settings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_settings(buffer.str());
}

std::string run_settings_to_json(const RunSettings& settings) {
  return detail::settings_to_json(settings).dump(2);
}

}  // namespace sigverify

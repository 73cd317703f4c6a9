#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sigverify/eval.hpp"

namespace sigverify {

/// Parses the run-config JSON document (sections "preprocess", "dtw", "knn",
/// "protocol"; every section and key optional, defaults apply). Unknown keys
/// are rejected so typos never silently fall back to defaults.
RunSettings parse_run_settings(std::string_view json_text);

RunSettings load_run_settings(const std::filesystem::path& path);

/// Serializes settings to the same schema parse_run_settings accepts.
std::string run_settings_to_json(const RunSettings& settings);

}  // namespace sigverify

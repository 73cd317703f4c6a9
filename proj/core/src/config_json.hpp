#pragma once

#include <nlohmann/json.hpp>

#include "sigverify/eval.hpp"

namespace sigverify::detail {

nlohmann::json settings_to_json(const RunSettings& settings);
RunSettings settings_from_json(const nlohmann::json& doc);

}  // namespace sigverify::detail

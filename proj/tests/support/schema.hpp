#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace verifai::testing {

/// Validates against the subset of JSON Schema used by docs/*.schema.json:
/// type, enum, required, properties, additionalProperties (false), items,
/// minimum, minLength and pattern. Returns one message per violation.
std::vector<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& value);

nlohmann::json load_json_file(const std::string& path);

} // namespace verifai::testing

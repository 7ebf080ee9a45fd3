#pragma once

// Validator for the JSON Schema subset used by the role schemas: type,
// properties, required, additionalProperties (false only), items, enum,
// minimum, maximum, exclusiveMinimum, minItems, maxItems, minLength and
// pattern.

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace filmset {

/// Throws Error{SchemaViolation} whose path names the failing instance
/// location, e.g. `rooms[0].width`.
void validate_json(const nlohmann::json& schema, const nlohmann::json& instance);

/// Schema shipped with the library, e.g. `shape_wall`. Throws InvalidArgument.
const nlohmann::json& builtin_schema(std::string_view id);

} // namespace filmset

#pragma once

#include <string>

#include "json.hpp"

namespace contrastshap {

using Json = nlohmann::ordered_json;

// Serializes with a stable layout: keys in insertion order, two-space indent, reals with
// 17 significant digits, trailing newline.
std::string dump_json(const Json& value);

// Returns every violation of `schema` found in `doc` (empty when valid). Supports the
// JSON Schema subset used by the shipped schemas: type, properties, required,
// additionalProperties, items, enum, const, minimum, maximum, minItems.
std::vector<std::string> schema_violations(const Json& doc, const Json& schema);

// Embedded v1 schema by short name: metric_table, attributions, agreement, uncertainty, report.
const Json& schema_v1(const std::string& name);

}  // namespace contrastshap

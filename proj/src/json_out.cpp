#include "contrastshap/json_out.hpp"

#include <cmath>
#include <map>

#include "contrastshap/error.hpp"
#include "contrastshap/table_io.hpp"
#include "schemas_embedded.hpp"

namespace contrastshap {

namespace {

void write_value(std::string& out, const Json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        write_value(out, it.value(), depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) out += ", ";
          write_value(out, v[i], depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        write_value(out, v[i], depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
      } else {
        out += io::format_real(d);
      }
      return;
    }
    default:
      out += v.dump();
  }
}

bool type_matches(const Json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") {
    return doc.is_number_integer() ||
           (doc.is_number_float() && std::floor(doc.get<double>()) == doc.get<double>());
  }
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

void check(const Json& doc, const Json& schema, const std::string& path,
           std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else {
      for (const auto& alt : t) ok = ok || type_matches(doc, alt.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("const") && doc != schema["const"]) {
    errors.push_back(path + ": expected " + schema["const"].dump());
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || doc == e;
    if (!found) errors.push_back(path + ": value not in " + schema["enum"].dump());
  }
  if (doc.is_number()) {
    const double d = doc.get<double>();
    if (schema.contains("minimum") && d < schema["minimum"].get<double>()) {
      errors.push_back(path + ": below minimum " + schema["minimum"].dump());
    }
    if (schema.contains("maximum") && d > schema["maximum"].get<double>()) {
      errors.push_back(path + ": above maximum " + schema["maximum"].dump());
    }
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required '" + key.get<std::string>() + "'");
        }
      }
    }
    const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string child = path + "." + it.key();
      if (props != nullptr && props->contains(it.key())) {
        check(it.value(), (*props)[it.key()], child, errors);
      } else if (schema.contains("additionalProperties")) {
        const auto& extra = schema["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) errors.push_back(child + ": unexpected property");
        } else {
          check(it.value(), extra, child, errors);
        }
      }
    }
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>()) {
      errors.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < doc.size(); ++i) {
        check(doc[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  write_value(out, value, 0);
  out += '\n';
  return out;
}

std::vector<std::string> schema_violations(const Json& doc, const Json& schema) {
  std::vector<std::string> errors;
  check(doc, schema, "$", errors);
  return errors;
}

const Json& schema_v1(const std::string& name) {
  static const std::map<std::string, Json> schemas = [] {
    std::map<std::string, Json> m;
    for (const auto& [key, text] : embedded_schemas()) m.emplace(key, Json::parse(text));
    return m;
  }();
  auto it = schemas.find(name);
  if (it == schemas.end()) throw Error(ErrorCode::kConfigInvalid, "no schema named '" + name + "'");
  return it->second;
}

}  // namespace contrastshap

#pragma once

// Just enough of JSON Schema draft-07 to validate run records in tests:
// type, enum, required, properties, additionalProperties:false, items,
// minimum/maximum, oneOf, and $ref into #/$defs.

#include <string>

#include <json.hpp>

namespace schema_check {

using nlohmann::json;

inline bool type_matches(const std::string& t, const json& node) {
  if (t == "object") return node.is_object();
  if (t == "array") return node.is_array();
  if (t == "string") return node.is_string();
  if (t == "boolean") return node.is_boolean();
  if (t == "integer") return node.is_number_integer() || node.is_number_unsigned();
  if (t == "number") return node.is_number();
  if (t == "null") return node.is_null();
  return false;
}

inline bool validate_node(const json& schema, const json& node, const json& root,
                          std::string* why) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0 || !root["$defs"].contains(ref.substr(prefix.size()))) {
      *why = "unresolvable $ref " + ref;
      return false;
    }
    return validate_node(root["$defs"][ref.substr(prefix.size())], node, root, why);
  }
  if (schema.contains("oneOf")) {
    int hits = 0;
    for (const auto& alt : schema["oneOf"]) {
      std::string local;
      if (validate_node(alt, node, root, &local)) ++hits;
    }
    if (hits != 1) {
      *why = "oneOf matched " + std::to_string(hits) + " alternatives";
      return false;
    }
    return true;
  }
  if (schema.contains("type") && !type_matches(schema["type"].get<std::string>(), node)) {
    *why = "expected type " + schema["type"].get<std::string>();
    return false;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) {
      if (v == node) found = true;
    }
    if (!found) {
      *why = "value " + node.dump() + " not in enum";
      return false;
    }
  }
  if (node.is_number()) {
    if (schema.contains("minimum") && node.get<double>() < schema["minimum"].get<double>()) {
      *why = "value below minimum";
      return false;
    }
    if (schema.contains("maximum") && node.get<double>() > schema["maximum"].get<double>()) {
      *why = "value above maximum";
      return false;
    }
  }
  if (node.is_object()) {
    if (schema.contains("required")) {
      for (const auto& k : schema["required"]) {
        if (!node.contains(k.get<std::string>())) {
          *why = "missing required key " + k.get<std::string>();
          return false;
        }
      }
    }
    const json props = schema.contains("properties") ? schema["properties"] : json::object();
    const bool extra_ok =
        !(schema.contains("additionalProperties") && schema["additionalProperties"] == false);
    for (const auto& item : node.items()) {
      if (props.contains(item.key())) {
        if (!validate_node(props[item.key()], item.value(), root, why)) {
          *why = item.key() + ": " + *why;
          return false;
        }
      } else if (!extra_ok) {
        *why = "unexpected key " + item.key();
        return false;
      }
    }
  }
  if (node.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& item : node) {
      if (!validate_node(schema["items"], item, root, why)) {
        *why = "item " + std::to_string(i) + ": " + *why;
        return false;
      }
      ++i;
    }
  }
  return true;
}

inline bool validate(const json& schema, const json& instance, std::string* why) {
  return validate_node(schema, instance, schema, why);
}

}  // namespace schema_check

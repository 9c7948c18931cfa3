// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal JSON-schema checker covering the keyword subset used by the
// schemas under docs/schemas: type, properties, required,
// additionalProperties (bool or schema), items, enum, minimum, maximum,
// minItems, pattern, and local $ref into $defs.

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace schema_check {

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(in);
}

inline bool type_matches(const std::string& type, const nlohmann::json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return false;
}

inline void validate_node(const nlohmann::json& schema, const nlohmann::json& root_schema,
                          const nlohmann::json& value, const std::string& path,
                          std::vector<std::string>& errors) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"].get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) {
            errors.push_back(path + ": unsupported $ref " + ref);
            return;
        }
        const std::string name = ref.substr(prefix.size());
        if (!root_schema.contains("$defs") || !root_schema["$defs"].contains(name)) {
            errors.push_back(path + ": unresolved $ref " + ref);
            return;
        }
        validate_node(root_schema["$defs"][name], root_schema, value, path, errors);
        return;
    }

    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& candidate : schema["enum"])
            if (candidate == value) found = true;
        if (!found) errors.push_back(path + ": value not in enum");
    }

    if (schema.contains("type")) {
        const auto& type = schema["type"];
        bool ok = false;
        if (type.is_string()) {
            ok = type_matches(type.get<std::string>(), value);
        } else {
            for (const auto& t : type)
                if (type_matches(t.get<std::string>(), value)) ok = true;
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch (got " +
                             std::string(value.type_name()) + ")");
            return;
        }
    }

    if (value.is_number()) {
        const double v = value.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>())
            errors.push_back(path + ": below minimum");
        if (schema.contains("maximum") && v > schema["maximum"].get<double>())
            errors.push_back(path + ": above maximum");
    }

    if (value.is_string() && schema.contains("pattern")) {
        const std::regex re(schema["pattern"].get<std::string>());
        if (!std::regex_search(value.get<std::string>(), re))
            errors.push_back(path + ": pattern mismatch");
    }

    if (value.is_array()) {
        if (schema.contains("minItems") &&
            value.size() < schema["minItems"].get<std::size_t>())
            errors.push_back(path + ": fewer than minItems entries");
        if (schema.contains("items")) {
            std::size_t i = 0;
            for (const auto& item : value) {
                validate_node(schema["items"], root_schema, item,
                              path + "[" + std::to_string(i) + "]", errors);
                ++i;
            }
        }
    }

    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& name : schema["required"])
                if (!value.contains(name.get<std::string>()))
                    errors.push_back(path + ": missing required key " +
                                     name.get<std::string>());
        const auto& props =
            schema.contains("properties") ? schema["properties"] : nlohmann::json::object();
        for (const auto& [key, member] : value.items()) {
            if (props.contains(key)) {
                validate_node(props[key], root_schema, member, path + "." + key, errors);
            } else if (schema.contains("additionalProperties")) {
                const auto& extra = schema["additionalProperties"];
                if (extra.is_boolean()) {
                    if (!extra.get<bool>())
                        errors.push_back(path + ": unexpected key " + key);
                } else {
                    validate_node(extra, root_schema, member, path + "." + key, errors);
                }
            }
        }
    }
}

/// Returns the list of violations; empty means the document conforms.
inline std::vector<std::string> validate(const nlohmann::json& schema,
                                         const nlohmann::json& document) {
    std::vector<std::string> errors;
    validate_node(schema, schema, document, "$", errors);
    return errors;
}

inline std::string describe(const std::vector<std::string>& errors) {
    std::ostringstream out;
    for (const auto& e : errors) out << e << "; ";
    return out.str();
}

} // namespace schema_check

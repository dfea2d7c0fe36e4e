#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

namespace gbf {

/// Validator for the JSON Schema keywords the config schema uses:
/// type, enum, const, required, properties, additionalProperties (bool or
/// schema), items, minItems, uniqueItems, minimum, maximum, exclusiveMinimum,
/// oneOf, anyOf, minLength and local "$ref": "#/$defs/...".
class SchemaValidator {
public:
    explicit SchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {}

    /// Human-readable violations; empty when the instance is valid.
    [[nodiscard]] std::vector<std::string> validate(const nlohmann::json& instance) const {
        std::vector<std::string> errs;
        check(root_, instance, "$", errs);
        return errs;
    }

private:
    const nlohmann::json& resolve(const nlohmann::json& s) const {
        if (s.is_object() && s.contains("$ref")) {
            const std::string ref = s["$ref"].get<std::string>();
            const std::string prefix = "#/$defs/";
            if (ref.rfind(prefix, 0) == 0) return root_.at("$defs").at(ref.substr(prefix.size()));
        }
        return s;
    }

    static bool type_matches(const std::string& t, const nlohmann::json& v) {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "null") return v.is_null();
        if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
        if (t == "number") return v.is_number();
        return false;
    }

    void check(const nlohmann::json& schema_in, const nlohmann::json& v, const std::string& path,
               std::vector<std::string>& errs) const {
        const auto& s = resolve(schema_in);
        if (s.is_boolean()) {
            if (!s.get<bool>()) errs.push_back(path + ": not allowed");
            return;
        }
        if (s.contains("type")) {
            bool ok = false;
            if (s["type"].is_array()) {
                for (const auto& t : s["type"]) ok = ok || type_matches(t.get<std::string>(), v);
            } else {
                ok = type_matches(s["type"].get<std::string>(), v);
            }
            if (!ok) {
                errs.push_back(path + ": expected type " + s["type"].dump());
                return;
            }
        }
        if (s.contains("const") && v != s["const"]) errs.push_back(path + ": must equal " + s["const"].dump());
        if (s.contains("enum")) {
            bool found = false;
            for (const auto& e : s["enum"]) found = found || e == v;
            if (!found) errs.push_back(path + ": " + v.dump() + " not one of " + s["enum"].dump());
        }
        if (v.is_number()) {
            const double x = v.get<double>();
            if (s.contains("minimum") && x < s["minimum"].get<double>()) errs.push_back(path + ": below minimum " + s["minimum"].dump());
            if (s.contains("maximum") && x > s["maximum"].get<double>()) errs.push_back(path + ": above maximum " + s["maximum"].dump());
            if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
                errs.push_back(path + ": must exceed " + s["exclusiveMinimum"].dump());
            }
        }
        if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<std::size_t>()) {
            errs.push_back(path + ": string too short");
        }
        if (v.is_object()) {
            if (s.contains("required")) {
                for (const auto& r : s["required"]) {
                    if (!v.contains(r.get<std::string>())) errs.push_back(path + ": missing required property '" + r.get<std::string>() + "'");
                }
            }
            const auto props = s.value("properties", nlohmann::json::object());
            for (const auto& [key, val] : v.items()) {
                if (props.contains(key)) {
                    check(props[key], val, path + "." + key, errs);
                } else if (s.contains("additionalProperties")) {
                    const auto& ap = s["additionalProperties"];
                    if (ap.is_boolean() && !ap.get<bool>()) {
                        errs.push_back(path + ": unknown property '" + key + "'");
                    } else if (ap.is_object()) {
                        check(ap, val, path + "." + key, errs);
                    }
                }
            }
        }
        if (v.is_array()) {
            if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) errs.push_back(path + ": too few items");
            if (s.contains("items")) {
                for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "[" + std::to_string(i) + "]", errs);
            }
            if (s.value("uniqueItems", false)) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    for (std::size_t j = i + 1; j < v.size(); ++j) {
                        if (v[i] == v[j]) errs.push_back(path + ": duplicate items");
                    }
                }
            }
        }
        if (s.contains("oneOf")) {
            int matches = 0;
            for (const auto& alt : s["oneOf"]) {
                std::vector<std::string> sub;
                check(alt, v, path, sub);
                matches += sub.empty() ? 1 : 0;
            }
            if (matches != 1) errs.push_back(path + ": must match exactly one alternative (matched " + std::to_string(matches) + ")");
        }
        if (s.contains("anyOf")) {
            bool any = false;
            for (const auto& alt : s["anyOf"]) {
                std::vector<std::string> sub;
                check(alt, v, path, sub);
                any = any || sub.empty();
            }
            if (!any) errs.push_back(path + ": matches no alternative");
        }
    }

    nlohmann::json root_;
};

}  // namespace gbf

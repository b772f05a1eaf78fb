#include "schema.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <stdexcept>

namespace verifai::testing {

namespace {

bool has_type(const nlohmann::json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "number") return v.is_number();
    if (type == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
    throw std::invalid_argument("unsupported schema type " + type);
}

void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path,
           std::vector<std::string>& errors) {
    if (auto t = schema.find("type"); t != schema.end()) {
        bool ok = false;
        if (t->is_array()) {
            for (const auto& one : *t) {
                ok = ok || has_type(v, one.get<std::string>());
            }
        } else {
            ok = has_type(v, t->get<std::string>());
        }
        if (!ok) {
            errors.push_back(path + ": expected type " + t->dump() + ", got " + v.type_name());
            return;
        }
    }
    if (auto e = schema.find("enum"); e != schema.end()) {
        if (std::find(e->begin(), e->end(), v) == e->end()) {
            errors.push_back(path + ": " + v.dump() + " not in " + e->dump());
        }
    }
    if (v.is_number()) {
        if (auto m = schema.find("minimum"); m != schema.end() && v.get<double>() < m->get<double>()) {
            errors.push_back(path + ": " + v.dump() + " below minimum " + m->dump());
        }
    }
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (auto m = schema.find("minLength"); m != schema.end() && s.size() < m->get<std::size_t>()) {
            errors.push_back(path + ": string shorter than " + m->dump());
        }
        if (auto p = schema.find("pattern"); p != schema.end() && !std::regex_search(s, std::regex(p->get<std::string>()))) {
            errors.push_back(path + ": " + v.dump() + " does not match " + p->dump());
        }
    }
    if (v.is_object()) {
        if (auto r = schema.find("required"); r != schema.end()) {
            for (const auto& key : *r) {
                if (!v.contains(key.get<std::string>())) {
                    errors.push_back(path + ": missing required key " + key.dump());
                }
            }
        }
        const auto props = schema.find("properties");
        for (const auto& [key, child] : v.items()) {
            if (props != schema.end() && props->contains(key)) {
                check((*props)[key], child, path + "/" + key, errors);
            } else if (auto ap = schema.find("additionalProperties"); ap != schema.end() && ap->is_boolean() && !ap->get<bool>()) {
                errors.push_back(path + ": unexpected key \"" + key + "\"");
            }
        }
    }
    if (v.is_array()) {
        if (auto items = schema.find("items"); items != schema.end()) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                check(*items, v[i], path + "/" + std::to_string(i), errors);
            }
        }
    }
}

} // namespace

std::vector<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& value) {
    std::vector<std::string> errors;
    check(schema, value, "", errors);
    return errors;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return nlohmann::json::parse(in);
}

} // namespace verifai::testing

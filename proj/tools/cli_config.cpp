#include "cli_config.hpp"

#include <fmt/format.h>

#include <fstream>

#include "blowup/errors.hpp"
#include "schema_embed.hpp"

namespace blowup::cli {

namespace {

bool has_type(const Json& value, const std::string& type) {
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "array") return value.is_array();
    if (type == "null") return value.is_null();
    return false;
}

void check_value(const std::string& key, const Json& value, const Json& rule) {
    if (rule.contains("type")) {
        const Json& t = rule["type"];
        bool ok = false;
        if (t.is_array()) {
            for (const auto& alt : t) ok = ok || has_type(value, alt.get<std::string>());
        } else {
            ok = has_type(value, t.get<std::string>());
        }
        if (!ok) throw ConfigError(fmt::format("'{}' must have type {}", key, t.dump()));
    }
    if (value.is_number()) {
        const double v = value.get<double>();
        if (rule.contains("minimum") && v < rule["minimum"].get<double>())
            throw ConfigError(fmt::format("'{}' must be >= {}", key, rule["minimum"].dump()));
        if (rule.contains("maximum") && v > rule["maximum"].get<double>())
            throw ConfigError(fmt::format("'{}' must be <= {}", key, rule["maximum"].dump()));
        if (rule.contains("exclusiveMinimum") && v <= rule["exclusiveMinimum"].get<double>())
            throw ConfigError(fmt::format("'{}' must be > {}", key, rule["exclusiveMinimum"].dump()));
        if (rule.contains("exclusiveMaximum") && v >= rule["exclusiveMaximum"].get<double>())
            throw ConfigError(fmt::format("'{}' must be < {}", key, rule["exclusiveMaximum"].dump()));
    }
    if (value.is_array()) {
        if (rule.contains("minItems") && value.size() < rule["minItems"].get<std::size_t>())
            throw ConfigError(fmt::format("'{}' needs at least {} entries", key, rule["minItems"].dump()));
        if (rule.contains("items"))
            for (std::size_t k = 0; k < value.size(); ++k)
                check_value(fmt::format("{}[{}]", key, k), value[k], rule["items"]);
    }
}

}  // namespace

const Json& schema() {
    static const Json parsed = Json::parse(kSchemaText);
    return parsed;
}

Json command_properties(const std::string& command) {
    const Json& s = schema();
    if (!s["commands"].contains(command)) throw ConfigError("unknown subcommand '" + command + "'");
    Json props = s["global"];
    for (const auto& [key, rule] : s["commands"][command].items()) props[key] = rule;
    return props;
}

Json resolve_config(const std::string& command, const Json& file_config, const Overrides& flags) {
    const Json props = command_properties(command);
    if (!file_config.is_null() && !file_config.is_object())
        throw ConfigError("config must be a JSON object");

    Json resolved = Json::object();
    for (const auto& [key, rule] : props.items()) resolved[key] = rule["default"];
    if (file_config.is_object()) {
        for (const auto& [key, value] : file_config.items()) {
            if (!props.contains(key))
                throw ConfigError(fmt::format("unknown key '{}' for subcommand {}", key, command));
            resolved[key] = value;
        }
    }
    if (flags.n) resolved["n"] = *flags.n;
    if (flags.T) resolved["T"] = *flags.T;
    if (flags.R) resolved["R"] = *flags.R;
    if (flags.out) resolved["out"] = *flags.out;
    if (flags.trace) {
        if (!props.contains("trace")) throw ConfigError("--trace only applies to rate-fit");
        resolved["trace"] = *flags.trace;
    }
    for (const auto& [key, rule] : props.items()) check_value(key, resolved[key], rule);
    return resolved;
}

Json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(fmt::format("config {} is not valid JSON: {}", path, e.what()));
    }
}

}  // namespace blowup::cli

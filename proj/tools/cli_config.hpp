#pragma once

#include <optional>
#include <string>

#include "json.hpp"

namespace blowup::cli {

using Json = nlohmann::json;

/// The embedded schema (config/schema.json).
[[nodiscard]] const Json& schema();

/// Property table of one subcommand: global keys plus its own.
[[nodiscard]] Json command_properties(const std::string& command);

/// Flag values that override the config file.
struct Overrides {
    std::optional<int> n;
    std::optional<double> T;
    std::optional<double> R;
    std::optional<std::string> out;
    std::optional<std::string> trace;
};

/// Defaults, then the config file, then flags; validated against the schema.
/// Throws ConfigError on unknown keys, wrong types or out-of-range values.
[[nodiscard]] Json resolve_config(const std::string& command, const Json& file_config,
                                  const Overrides& flags);

/// Reads a JSON config file; ConfigError on I/O or parse failure.
[[nodiscard]] Json read_config_file(const std::string& path);

}  // namespace blowup::cli

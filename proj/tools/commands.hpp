#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cli_config.hpp"

namespace blowup::cli {

/// Output directory that remembers what was written into it.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    [[nodiscard]] std::filesystem::path path(const std::string& name);
    void write_text(const std::string& name, const std::string& text);
    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

/// Runs one subcommand on a resolved config and writes its files plus
/// manifest.json. Throws ConfigError or NumericalError from the modules.
void run_command(const std::string& command, const Json& config, int threads);

}  // namespace blowup::cli

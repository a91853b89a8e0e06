#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "blowup/errors.hpp"
#include "cli_config.hpp"
#include "commands.hpp"

namespace {

using blowup::cli::Json;

int fail(int code, const std::string& kind, const std::string& command, const std::string& message) {
    std::cerr << Json{{"error", kind}, {"command", command}, {"message", message}}.dump() << '\n';
    return code;
}

int thread_count() {
    const char* env = std::getenv("BLOWUP_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw blowup::ConfigError("BLOWUP_THREADS must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type II blow-up toolkit: profiles, spectra, residual scans, parameter ODEs, inner modes, simulation"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        blowup::cli::Overrides over;
    };
    std::map<std::string, Flags> flags;
    for (const char* name : {"profiles", "spectrum", "residual-scan", "ode", "inner", "simulate", "rate-fit"}) {
        auto* sub = app.add_subcommand(name);
        Flags& f = flags[name];
        sub->add_option("--config", f.config, "JSON config file (see config/schema.json)");
        sub->add_option("--out", f.over.out, "output directory");
        sub->add_option("--n", f.over.n, "dimension n");
        sub->add_option("--T", f.over.T, "blow-up time T");
        sub->add_option("--R", f.over.R, "inner cutoff radius R");
        if (std::string(name) == "rate-fit") sub->add_option("--trace", f.over.trace, "trace CSV");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(2, "config", "", e.what());
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Flags& f = flags[command];
    try {
        const Json file = f.config.empty() ? Json() : blowup::cli::read_config_file(f.config);
        const Json resolved = blowup::cli::resolve_config(command, file, f.over);
        blowup::cli::run_command(command, resolved, thread_count());
    } catch (const blowup::ConfigError& e) {
        return fail(2, "config", command, e.what());
    } catch (const blowup::NumericalError& e) {
        return fail(3, "numerical", command, e.what());
    } catch (const std::exception& e) {
        return fail(3, "failure", command, e.what());
    }
    return 0;
}

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>

#include "blowup/errors.hpp"
#include "cli_config.hpp"
#include "commands.hpp"
#include "doctest.h"

using namespace blowup;
using cli::Json;
namespace fs = std::filesystem;

namespace {

/// Fresh empty directory under the system temp dir, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args, const fs::path& stderr_file) {
    const std::string cmd = std::string(BLOWUP_CLI_PATH) + " " + args + " >/dev/null 2>" + stderr_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("resolved config: defaults, file, then flags") {
    const Json d = cli::resolve_config("profiles", Json::object(), {});
    CHECK(d["n"] == 6);
    CHECK(d["T"] == 0.01);
    CHECK(d["R"] == 20.0);
    CHECK(d["out"] == "out");
    CHECK(d["nodes"] == 400);

    cli::Overrides flags;
    flags.n = 8;
    const Json r = cli::resolve_config("profiles", Json{{"n", 7}, {"T", 0.02}}, flags);
    CHECK(r["n"] == 8);
    CHECK(r["T"] == 0.02);

    const Json s = cli::resolve_config("spectrum", Json::object(), {});
    CHECK(s["coercivity_R"].is_null());
    CHECK_FALSE(s.contains("nodes"));
}

TEST_CASE("schema violations are config errors") {
    CHECK_THROWS_AS((void)cli::resolve_config("profiles", Json{{"n", 5}}, {}), ConfigError);
    CHECK_THROWS_AS((void)cli::resolve_config("profiles", Json{{"n", 6.5}}, {}), ConfigError);
    CHECK_THROWS_AS((void)cli::resolve_config("profiles", Json{{"bogus", 1}}, {}), ConfigError);
    CHECK_THROWS_AS((void)cli::resolve_config("profiles", Json{{"T", -1.0}}, {}), ConfigError);
    CHECK_THROWS_AS((void)cli::resolve_config("residual-scan", Json{{"T_list", Json::array()}}, {}), ConfigError);
    CHECK_THROWS_AS((void)cli::resolve_config("nope", Json::object(), {}), ConfigError);
    CHECK_THROWS_AS((void)cli::read_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("every subcommand has a schema entry and the shipped schema parses") {
    for (const char* cmd : {"profiles", "spectrum", "residual-scan", "ode", "inner", "simulate", "rate-fit"}) {
        const Json props = cli::command_properties(cmd);
        CHECK(props.contains("n"));
        CHECK(props.contains("out"));
    }
    std::ifstream in(std::string(BLOWUP_SOURCE_DIR) + "/config/schema.json");
    CHECK(Json::parse(in) == cli::schema());
}

TEST_CASE("profiles writes its files deterministically with a full manifest") {
    TempDir a("blowup_cli_a"), b("blowup_cli_b");
    cli::Overrides flags;
    flags.out = a.path.string();
    cli::run_command("profiles", cli::resolve_config("profiles", Json::object(), flags), 1);
    flags.out = b.path.string();
    cli::run_command("profiles", cli::resolve_config("profiles", Json::object(), flags), 1);

    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a.path)) names.insert(e.path().filename().string());
    const std::set<std::string> expected{"U.csv",  "Z0.csv", "Z1_axis.csv", "pi.csv",
                                         "h.csv",  "Z.csv",  "tildeZ.csv",  "manifest.json"};
    CHECK(names == expected);
    for (const auto& name : names)
        if (name != "manifest.json") CHECK_MESSAGE(slurp(a.path / name) == slurp(b.path / name), name);

    const Json manifest = Json::parse(slurp(a.path / "manifest.json"));
    CHECK(manifest["command"] == "profiles");
    CHECK(manifest["config"]["n"] == 6);
    CHECK(manifest["threads"] == 1);
    CHECK(manifest["outputs"].size() == names.size());
    CHECK(slurp(a.path / "U.csv").rfind("r,U\n", 0) == 0);
}

TEST_CASE("rate-fit on a written trace") {
    TempDir dir("blowup_cli_rate");
    const fs::path trace = dir.path / "trace.csv";
    {
        std::ofstream os(trace);
        os << "# synthetic\nt,sup_u\n";
        for (int k = 0; k < 40; ++k) {
            const double t = 1e-2 * (1.0 - std::pow(0.9, k));
            os << t << ',' << std::pow(1e-2 - t, -3.0) << '\n';
        }
    }
    cli::Overrides flags;
    flags.out = dir.path.string();
    flags.trace = trace.string();
    cli::run_command("rate-fit", cli::resolve_config("rate-fit", Json::object(), flags), 1);
    const Json fit = Json::parse(slurp(dir.path / "ratefit.json"));
    CHECK(fit["exponent"].get<double>() == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("binary exit codes and error lines") {
    TempDir dir("blowup_cli_exit");
    const fs::path err = dir.path / "stderr.txt";
    const std::string out = " --out " + (dir.path / "o").string();

    CHECK(run_cli("--help", err) == 0);
    CHECK(run_cli("profiles --n 5" + out, err) == 2);
    const Json line = Json::parse(slurp(err));
    CHECK(line["error"] == "config");
    CHECK(line["command"] == "profiles");
    CHECK(line["message"].get<std::string>().find("'n'") != std::string::npos);

    CHECK(run_cli("profiles --bogus" + out, err) == 2);
    CHECK(run_cli("nosuch", err) == 2);

    const fs::path bad = dir.path / "bad.json";
    std::ofstream(bad) << "{\"n\": 6,";
    CHECK(run_cli("profiles --config " + bad.string() + out, err) == 2);

    // a decaying sup has no blow-up time to fit
    const fs::path trace = dir.path / "decay.csv";
    {
        std::ofstream os(trace);
        os << "t,sup_u\n";
        for (int k = 0; k < 40; ++k) os << 0.01 * k << ',' << std::exp(-0.1 * k) << '\n';
    }
    CHECK(run_cli("rate-fit --trace " + trace.string() + out, err) == 3);
    CHECK(Json::parse(slurp(err))["error"] == "numerical");
}

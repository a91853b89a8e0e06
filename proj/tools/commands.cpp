#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/inner_modes.hpp"
#include "blowup/param_odes.hpp"
#include "blowup/pdesim.hpp"
#include "blowup/spectral.hpp"

namespace blowup::cli {

namespace fs = std::filesystem;

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw ConfigError(fmt::format("cannot create output directory {}: {}", root_.string(), ec.message()));
}

fs::path OutputDir::path(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return root_ / name;
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (root_ / name).string());
    os << text;
}

namespace {

using Columns = std::vector<std::pair<std::string, std::function<double(double)>>>;

std::string radial_csv(const std::vector<double>& grid, const Columns& cols) {
    std::string out = "r";
    for (const auto& c : cols) out += "," + c.first;
    out += '\n';
    for (double r : grid) {
        out += fmt::format("{:.17g}", r);
        for (const auto& c : cols) out += fmt::format(",{:.17g}", c.second(r));
        out += '\n';
    }
    return out;
}

std::vector<double> doubles(const Json& j) { return j.get<std::vector<double>>(); }

std::vector<double> around_R(const Json& j, double R) {
    return j.is_null() ? std::vector<double>{0.5 * R, R, 2.0 * R} : doubles(j);
}

NormSpec norm_spec(const Json& c, const DimensionConfig& cfg) {
    NormSpec spec{c["alpha"].get<double>(), c["sigma"].get<double>(), c["a"].get<double>()};
    spec.validate(cfg.n);
    return spec;
}

GeometryConfig geometry(const Json& c) {
    GeometryConfig g;
    g.R = c["R"].get<double>();
    g.Rprime = 2.0 * g.R;
    return g;
}

DimensionConfig dimension(const Json& c) { return DimensionConfig::make(c["n"].get<int>()); }

Json cmd_profiles(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const double r_max = c["r_max"].get<double>();
    const int nodes = c["nodes"].get<int>();
    const std::vector<double> grid = geometric_grid(1e-3, r_max, nodes);
    const std::vector<double> positive(grid.begin() + 1, grid.end());

    const PiProfile pi(cfg);
    const CorrectionH h(cfg, std::max(1e3, r_max));
    const TildeZ tz(cfg, positive);
    const EigenPair ground = negative_eigenpair(cfg, c["eigen_radius"].get<double>(), c["eigen_cells"].get<int>());
    std::vector<double> ball;
    std::copy_if(grid.begin(), grid.end(), std::back_inserter(ball),
                 [&](double r) { return r <= ground.Z.grid.back(); });

    out.write_text("U.csv", radial_csv(grid, {{"U", [&](double r) { return bubble_U(r, cfg); }}}));
    out.write_text("Z0.csv", radial_csv(grid, {{"Z0", [&](double r) { return kernel_Z0(r, cfg); }}}));
    out.write_text("Z1_axis.csv",
                   radial_csv(grid, {{"Z1", [&](double r) { return kernel_Z1({r, 0.0}, cfg); }}}));
    out.write_text("pi.csv", radial_csv(grid, {{"pi", [&](double r) { return pi(r); }}}));
    out.write_text("h.csv", radial_csv(grid, {{"h", [&](double r) { return h.value(r); }}}));
    out.write_text("Z.csv", radial_csv(ball, {{"Z", [&](double r) { return ground.Z(r); }}}));
    out.write_text("tildeZ.csv", radial_csv(positive, {{"tildeZ", [&](double r) { return tz.value(r); }}}));
    return {{"ell", constant_ell(cfg)}, {"mu0", ground.mu0}, {"pi_z0_coefficient", pi.z0_coefficient()},
            {"h_wronskian", h.wronskian()}};
}

Json cmd_spectrum(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const EigenPair e = negative_eigenpair(cfg, c["eigen_radius"].get<double>(), c["eigen_cells"].get<int>());
    const double z_min = *std::min_element(e.Z.values.begin(), e.Z.values.end() - 1);
    Json rows = Json::array();
    std::string csv = "R,gamma_R,constrained_min,unconstrained_min,projection_overlap\n";
    for (double R : around_R(c["coercivity_R"], c["R"].get<double>())) {
        const CoercivityResult r = coercivity_constant(cfg, R, c["coercivity_cells"].get<int>());
        csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", R, r.gamma_R, r.constrained_min,
                           r.unconstrained_min, r.projection_overlap);
        rows.push_back({{"R", R},
                        {"gamma_R", r.gamma_R},
                        {"constrained_min", r.constrained_min},
                        {"unconstrained_min", r.unconstrained_min}});
    }
    out.write_text("coercivity.csv", csv);
    out.write_text("Z.csv", radial_csv(e.Z.grid, {{"Z", [&](double r) { return e.Z(r); }}}));
    const Json summary{{"mu0", e.mu0},
                       {"gap", e.gap},
                       {"decay_rate", e.decay_rate},
                       {"sqrt_abs_mu0", std::sqrt(std::abs(e.mu0))},
                       {"residual", e.residual},
                       {"Z_positive", z_min > 0.0},
                       {"coercivity", rows}};
    out.write_text("spectrum.json", summary.dump(2) + "\n");
    return summary;
}

Json cmd_residual_scan(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const NormSpec spec = norm_spec(c, cfg);
    Lattice lat;
    lat.radial_nodes = c["radial_nodes"].get<int>();
    lat.times = c["times"].get<int>();
    const ScanPath path{c["lam1_kappa"].get<double>(), c["d1_kappa"].get<double>()};
    const ScanResult scan = residual_norm_scan(cfg, doubles(c["T_list"]), around_R(c["R_list"], c["R"].get<double>()),
                                        spec, path, lat);
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    out.write_text("scan.csv", csv.str());
    const Json summary{{"rows", scan.rows.size()},
                       {"max_ratio", scan.max_ratio},
                       {"median_ratio", scan.median_ratio},
                       {"max_over_median", scan.max_ratio / scan.median_ratio},
                       {"R_power", scan.R_power},
                       {"lattice", Json::parse(scan.lattice.to_json())}};
    out.write_text("scan.json", summary.dump(2) + "\n");
    return summary;
}

Json cmd_ode(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const double T = c["T"].get<double>();
    const double R = c["R"].get<double>();

    std::string lam = "t,relative_residual\n";
    const int samples = c["lambda0_samples"].get<int>();
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = T * (1.0 - std::pow(10.0, -0.4 * k));
        const double res = lambda0_ode_residual(t, T, cfg);
        worst = std::max(worst, std::abs(res));
        lam += fmt::format("{:.17g},{:.17g}\n", t, res);
    }
    out.write_text("lambda0_residual.csv", lam);

    const ARFit ar = fit_A_R(cfg, doubles(c["A_R_radii"]));
    const double A_R = ar.A_inf * (1.0 + ar.c / R);
    ReducedForcing forcing;
    forcing.A_R = A_R;
    QModel q;
    q.cross = c["cross"].get<double>();
    ReducedOptions opts;
    opts.max_iterations = c["max_iterations"].get<int>();
    opts.tolerance = c["tolerance"].get<double>();
    opts.nodes = c["nodes"].get<int>();
    opts.s_min_ratio = c["s_min_ratio"].get<double>();
    opts.sigma = c["sigma"].get<double>();

    const LeadingSolutions lead = leading_solutions(forcing, T, cfg, opts.nodes, opts.s_min_ratio);
    std::string lcsv = "s,d,d_rate,Lambda,Lambda_rate\n";
    for (std::size_t k = 0; k < lead.s.size(); ++k)
        lcsv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", lead.s[k], lead.d[k], lead.d_rate[k],
                            lead.Lambda[k], lead.Lambda_rate[k]);
    out.write_text("leading.csv", lcsv);

    const ReducedODEState st = solve_reduced_system(forcing, q, T, cfg, opts);
    std::ostringstream rcsv;
    st.write_csv(rcsv);
    out.write_text("reduced.csv", rcsv.str());

    GeometryConfig geom;
    geom.R = R;
    geom.Rprime = 2.0 * R;
    const ErrorModel model(Ansatz(cfg, T, geom, opts.sigma));
    const Mode0Cancellation cancel = mode0_cancellation(model, 0.9 * T);

    const ConstantsAB ab = constants_AB(cfg);
    Json fit = Json::array();
    for (std::size_t k = 0; k < ar.R.size(); ++k)
        fit.push_back({{"R", ar.R[k]}, {"A_R", ar.A_R[k]}, {"time_spread", ar.time_spread[k]}});
    const Json summary{{"lambda0_max_relative_residual", worst},
                       {"A", ab.A},
                       {"B", ab.B},
                       {"A_R_fit", {{"samples", fit}, {"A_inf", ar.A_inf}, {"c", ar.c}}},
                       {"A_R", A_R},
                       {"mode0_cancellation",
                        {{"t", cancel.t},
                         {"pairing", cancel.pairing},
                         {"scaling", cancel.scaling},
                         {"interaction", cancel.interaction},
                         {"translation", cancel.translation},
                         {"correction", cancel.correction},
                         {"ratio", cancel.ratio()}}},
                       {"iterations", Json::parse(st.iteration_log_json())},
                       {"converged", st.converged},
                       {"n1_norm", st.n1_norm}};
    out.write_text("ode.json", summary.dump(2) + "\n");
    return summary;
}

Json cmd_inner(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const double T = c["T"].get<double>();
    const double R = c["R"].get<double>();
    const NormSpec spec = norm_spec(c, cfg);

    // Mode decomposition of the inner forcing H at one time.
    const ErrorModel model(Ansatz(cfg, T, geometry(c), spec.sigma));
    const double t = c["decompose_time_fraction"].get<double>() * T;
    const PathState st = model.ansatz().path().at(t);
    SphereSampling sampling;
    const int count = c["decompose_radii"].get<int>();
    for (int k = 1; k <= count; ++k) sampling.radii.push_back(2.0 * R * k / count);
    sampling.angular = c["angular"].get<int>();
    const ModeDecomposition dec = decompose([&](InnerPoint y) { return assemble_H(y, st, model); }, sampling, cfg);
    std::string dcsv = "r,h0,h1\n";
    for (std::size_t k = 0; k < dec.h0.grid.size(); ++k)
        dcsv += fmt::format("{:.17g},{:.17g},{:.17g}\n", dec.h0.grid[k], dec.h0.values[k], dec.h1[0].values[k]);
    out.write_text("decomposition.csv", dcsv);

    // Elliptic inverses with round-trip residuals.
    const PiProfile pi(cfg);
    Mode0InverseOptions o0;
    o0.R = R;
    o0.nodes = c["nodes"].get<int>();
    o0.a = spec.a;
    const Mode0Inverse H = mode0_inverse([&](double r) { return pi(r); }, cfg, o0);
    const auto g = [](double r) { return std::exp(-r * r) * (1.0 - r * r); };
    Mode1InverseOptions o1;
    o1.nodes = o0.nodes;
    o1.a = spec.a;
    const Mode1Inverse phi = mode1_inverse(g, R, cfg, o1);

    double res0 = 0.0, res1 = 0.0;
    const double c0 = H(0.0) / kernel_Z0(0.0, cfg);
    for (int k = 0; k < 40; ++k) {
        const double r = 0.1 + (1.8 * R - 0.1) * k / 39.0;
        const double step = 3e-3 * std::max(1.0, r);
        const double l0 = apply_L0_fd([&](double s) { return H(s) - c0 * kernel_Z0(s, cfg); }, r, cfg, step);
        res0 = std::max(res0, std::abs(l0 + pi(r)));
        // φ - factor(r) U', a kernel multiple away from φ, keeps the stencil well conditioned
        const double l1 = apply_L1_fd([&](double s) { return bubble_dU(s, cfg) * phi.factor_change(r, s); }, r, cfg,
                                      3e-3 * std::max(1.0, r));
        res1 = std::max(res1, std::abs(l1 + g(r)));
    }
    out.write_text("mode0_inverse.csv", radial_csv(H.profile().grid, {{"H", [&](double r) { return H(r); }}}));
    out.write_text("mode1_inverse.csv", radial_csv(phi.profile().grid, {{"phi", [&](double r) { return phi(r); }}}));

    // Parabolic mode-0 problem forced by π.
    ParabolicOptions po;
    po.cells = c["parabolic_cells"].get<int>();
    po.norm = spec;
    const double tau0 = c["tau0"].get<double>();
    const double mu0 = std::abs(negative_eigenpair(cfg).mu0);
    const double tau_end = tau0 + c["tau_span"].get<double>() / mu0;
    const ParabolicSolution par = mode0_parabolic([&](double r, double) { return pi(r); }, R, tau0, tau_end, cfg, po);
    std::ostringstream pcsv;
    par.write_trace_csv(pcsv);
    out.write_text("parabolic.csv", pcsv.str());

    const Json summary{
        {"decomposition",
         {{"t", t},
          {"total_energy", dec.total_energy},
          {"mode0_energy", dec.mode0_energy},
          {"mode1_energy", dec.mode1_energy},
          {"hperp_energy", dec.hperp_energy},
          {"parseval_defect", dec.parseval_defect},
          {"resolution_defect", dec.resolution_defect}}},
        {"mode0_inverse",
         {{"forcing", "pi"},
          {"orthogonality_defect", H.orthogonality_defect()},
          {"bound_constant", H.bound_constant()},
          {"roundtrip_residual", res0}}},
        {"mode1_inverse",
         {{"forcing", "exp(-r^2)(1-r^2)"}, {"bound_constant", phi.bound_constant()}, {"roundtrip_residual", res1}}},
        {"parabolic",
         {{"tau0", tau0},
          {"tau_end", tau_end},
          {"mu0", par.mu0},
          {"growth_rate", par.growth_rate},
          {"sup_weighted_phi", par.sup_weighted_phi},
          {"steps", par.steps},
          {"rejections", par.rejections}}}};
    out.write_text("inner.json", summary.dump(2) + "\n");
    return summary;
}

Json cmd_simulate(const Json& c, OutputDir& out, Json& extra) {
    const DimensionConfig cfg = dimension(c);
    const Ansatz ansatz(cfg, c["T"].get<double>(), geometry(c), c["sigma"].get<double>());
    const Domain dom = Domain::from(ansatz.geometry());
    RunOptions opts;
    opts.stop_fraction = c["stop_fraction"].get<double>();
    opts.sup_factor = c["sup_factor"].get<double>();
    opts.quench_factor = c["quench_factor"].get<double>();
    opts.record_every = c["record_every"].get<int>();
    opts.max_steps = c["max_steps"].get<long>();
    opts.policy.cfl = c["cfl"].get<double>();
    opts.policy.dt_max = c["dt_max"].get<double>();
    opts.cells_x1 = c["cells_x1"].get<int>();
    opts.cells_rho = c["cells_rho"].get<int>();
    opts.resolution = c["resolution"].get<double>();
    extra = Json::parse(run_manifest_json(ansatz, dom, opts));

    const RunOutcome run = simulate_from_ansatz(ansatz, dom, opts);
    std::ostringstream csv;
    run.trace.write_csv(csv);
    out.write_text("trace.csv", csv.str());
    if (c["snapshot"].get<bool>()) {
        run.final_state.write_snapshot((out.path("final.bin").parent_path() / "final").string());
        (void)out.path("final.json");
        std::ostringstream axis;
        run.final_state.write_axis_csv(axis);
        out.write_text("final_axis.csv", axis.str());
    }

    double worst_ratio = 1.0, x1_min = std::numeric_limits<double>::infinity();
    double t_exit = -1.0;
    for (const auto& r : run.trace.records) {
        const double ratio = r.lam_num / r.lam0;
        worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
        if (t_exit < 0.0 && (ratio > 2.0 || ratio < 0.5)) t_exit = r.t;
        x1_min = std::min(x1_min, r.x1_star);
    }
    const auto& last = run.trace.records.back();
    Json summary{{"reason", run.trace.reason},
                 {"steps", run.trace.steps},
                 {"records", run.trace.records.size()},
                 {"t_final", last.t},
                 {"t_stop", opts.stop_fraction * ansatz.path().T()},
                 {"sup_initial", run.trace.records.front().sup_u},
                 {"sup_final", last.sup_u},
                 {"max_lambda_ratio", worst_ratio},
                 {"t_left_factor2_band", t_exit < 0.0 ? Json(nullptr) : Json(t_exit)},
                 {"min_x1_star", x1_min},
                 {"clipped_negative", run.trace.clipped_negative},
                 {"boundary_max", run.trace.boundary_max}};
    out.write_text("simulate.json", summary.dump(2) + "\n");
    return summary;
}

Json cmd_rate_fit(const Json& c, OutputDir& out) {
    const DimensionConfig cfg = dimension(c);
    const std::string path = c["trace"].get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read trace file " + path);
    const RunTrace trace = RunTrace::read_csv(in);
    FitWindow window;
    window.t_begin = c["t_begin"].get<double>();
    if (!c["t_end"].is_null()) window.t_end = c["t_end"].get<double>();
    if (!c["T_star"].is_null()) window.T_star = c["T_star"].get<double>();
    const RateFit fit = fit_rate(trace, window, cfg);
    const Json summary = Json::parse(fit.to_json());
    out.write_text("ratefit.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace

void run_command(const std::string& command, const Json& config, int threads) {
    OutputDir out(config["out"].get<std::string>());
    Json extra;
    Json summary;
    if (command == "profiles") summary = cmd_profiles(config, out);
    else if (command == "spectrum") summary = cmd_spectrum(config, out);
    else if (command == "residual-scan") summary = cmd_residual_scan(config, out);
    else if (command == "ode") summary = cmd_ode(config, out);
    else if (command == "inner") summary = cmd_inner(config, out);
    else if (command == "simulate") summary = cmd_simulate(config, out, extra);
    else if (command == "rate-fit") summary = cmd_rate_fit(config, out);
    else throw ConfigError("unknown subcommand '" + command + "'");

    Json manifest{{"command", command}, {"config", config}, {"threads", threads}, {"summary", summary}};
    if (!extra.is_null()) manifest["run"] = extra;
    std::vector<std::string> files = out.files();
    files.push_back("manifest.json");
    manifest["outputs"] = files;
    out.write_text("manifest.json", manifest.dump(2) + "\n");
}

}  // namespace blowup::cli

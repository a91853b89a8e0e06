// One line per acceptance criterion with its pinned tolerance. Exit status is
// the number of failed criteria.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "blowup/core_bubble.hpp"
#include "blowup/inner_modes.hpp"
#include "blowup/param_odes.hpp"
#include "blowup/pdesim.hpp"
#include "blowup/residual.hpp"
#include "blowup/spectral.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int k, const char* title, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, fmt::format("exception: {}", e.what())};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    fmt::print("criterion {:2d} [{}]: {}  {} ({:.1f} s)\n", k, title, v.pass ? "PASS" : "FAIL", v.detail, sec);
    std::fflush(stdout);
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// ----------------------------------------------------------------------------

Verdict bubble_exactness() {
    double worst = 0.0;
    for (int n = 6; n <= 11; ++n) {
        const auto cfg = DimensionConfig::make(n);
        const double scale = std::pow(bubble_U(0.0, cfg), cfg.p);
        for (double r = 1e-3; r < 1e3; r *= 1.1) {
            const double res =
                bubble_d2U(r, cfg) + (n - 1.0) / r * bubble_dU(r, cfg) + std::pow(bubble_U(r, cfg), cfg.p);
            worst = std::max(worst, std::abs(res) / scale);
        }
    }
    // kernel residuals of the discrete operators under step halving
    const auto cfg = DimensionConfig::make(6);
    auto sup_residual = [&](double h) {
        double z0 = 0.0, z1 = 0.0;
        for (double r = 0.2; r <= 10.0; r += 0.2) {
            z0 = std::max(z0, std::abs(apply_L0_fd([&](double s) { return kernel_Z0(s, cfg); }, r, cfg, h)));
            z1 = std::max(z1, std::abs(apply_L1_fd([&](double s) { return bubble_dU(s, cfg); }, r, cfg, h)));
        }
        return std::pair{z0, z1};
    };
    const auto [a0, a1] = sup_residual(0.04);
    const auto [b0, b1] = sup_residual(0.02);
    const double o0 = order(a0, b0), o1 = order(a1, b1);
    return {worst < 1e-10 && o0 >= 1.8 && o1 >= 1.8,
            fmt::format("max |ΔU+U^p|/U(0)^p = {:.2e} (tol 1e-10), n = 6..11; kernel orders Z0 {:.2f}, Z1 {:.2f} "
                        "(min 1.8)",
                        worst, o0, o1)};
}

Verdict integral_identity() {
    double worst = 0.0;
    for (int n : {6, 7, 8}) {
        const auto cfg = DimensionConfig::make(n);
        const auto ints = bubble_integrals(cfg);
        const double lhs = -cfg.p * ints.Upm1_Z0, rhs = 0.5 * (n - 2) * ints.U_p;
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return {worst < 1e-6, fmt::format("max relative defect {:.2e} (tol 1e-6), n = 6, 7, 8", worst)};
}

Verdict scaling_law() {
    double worst = 0.0;
    for (int n : {6, 7, 8}) {
        const auto cfg = DimensionConfig::make(n);
        const auto ints = bubble_integrals(cfg);
        for (int k = 0; k < 20; ++k) {
            const double T = 1e-2;
            worst = std::max(worst, lambda0_ode_residual(T * (1.0 - std::pow(10.0, -0.4 * k)), T, cfg, ints));
        }
    }
    const double gamma = DimensionConfig::make(6).gamma;
    return {worst < 1e-8 && gamma == 3.0,
            fmt::format("max lambda0 residual {:.2e} at 20 times (tol 1e-8); gamma(d = 7) = {} (want 3 exactly)",
                        worst, gamma)};
}

Verdict correction_profile() {
    const auto cfg = DimensionConfig::make(6);
    const PiProfile pi(cfg);
    const CorrectionH h(cfg);
    auto hv = [&](double r) { return h.value(r); };
    double worst = 0.0, scale = 0.0;
    for (double r = 0.1; r < 60.0; r *= 1.3) {
        const double step = 2e-3 * std::max(1.0, r);
        const double res =
            oracle::radial_laplacian(hv, r, 6, step) + cfg.p * bubble_potential(r, cfg) * h.value(r) - pi(r);
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(pi(r)));
    }
    auto tail = [](const CorrectionH& c) {
        double m = 0.0;
        for (double r = 10.0; r <= 100.0; r *= 1.05) m = std::max(m, r * r * std::abs(c.value(r)));
        return m;
    };
    const CorrectionH coarse(cfg, 1e3, 1024);
    const double drift = std::abs(tail(coarse) / tail(h) - 1.0);
    return {worst / scale < 1e-5 && drift < 0.1,
            fmt::format("round trip {:.2e} (tol 1e-5); sup r^2|h| on [10,100] = {:.4g}, change 1024->2048 nodes "
                        "{:.2e} (tol 0.1)",
                        worst / scale, tail(h), drift)};
}

Verdict spectrum() {
    const auto cfg = DimensionConfig::make(6);
    const EigenPair ep = negative_eigenpair(cfg, 40.0, 4000);
    bool positive = true;
    for (std::size_t i = 0; i + 1 < ep.Z.size(); ++i) positive = positive && ep.Z.values[i] > 0.0;
    const double rate_err = std::abs(ep.decay_rate / std::sqrt(-ep.mu0) - 1.0);
    return {ep.mu0 < 0.0 && ep.gap > 1e-3 && positive && rate_err < 0.1,
            fmt::format("mu0 = {:.6f}, gap {:.3f} (min 1e-3), Z positive: {}, tail rate {:.4f} vs sqrt|mu0| {:.4f} "
                        "(tol 10%)",
                        ep.mu0, ep.gap, positive ? "yes" : "no", ep.decay_rate, std::sqrt(-ep.mu0))};
}

Verdict coercivity() {
    const auto cfg = DimensionConfig::make(6);
    std::vector<double> g;
    bool ok = true;
    std::string vals;
    for (double R : {10.0, 20.0, 40.0}) {
        const CoercivityResult c = coercivity_constant(cfg, R);
        ok = ok && c.gamma_R > 0.0 && c.unconstrained_min < 0.0;
        g.push_back(c.gamma_R);
        vals += fmt::format("{}gamma_{:g} = {:.4f} (unconstrained {:.3f})", vals.empty() ? "" : ", ", R, c.gamma_R,
                            c.unconstrained_min);
    }
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    const double spread = *hi / *lo;
    return {ok && spread < 3.0, fmt::format("{}; max/min {:.3f} (max 3)", vals, spread)};
}

Verdict cancellation() {
    const auto cfg = DimensionConfig::make(6);
    const ErrorModel model(Ansatz(cfg, 1e-2));
    const Mode0Cancellation c = mode0_cancellation(model, 0.9e-2);
    return {c.ratio() <= 1e-2,
            fmt::format("|int H Z0| = {:.3e}, largest constituent {:.3e}, ratio {:.2e} (max 1e-2)", std::abs(c.pairing),
                        c.largest_constituent(), c.ratio())};
}

Verdict residual_scan() {
    const auto cfg = DimensionConfig::make(6);
    const ScanResult s = residual_norm_scan(cfg, {1e-40, 1e-60, 1e-80}, {10.0, 20.0, 40.0}, NormSpec{});
    const bool bounded = s.max_ratio <= 4.0 * s.median_ratio;
    const bool power = std::abs(s.R_power + 2.0) <= 0.6;
    return {bounded && power,
            fmt::format("max ratio {:.3g}, median {:.3g} (max/median {:.2f}, max 4); R power {:.3f} (want -2 +- 30%)",
                        s.max_ratio, s.median_ratio, s.max_ratio / s.median_ratio, s.R_power)};
}

Verdict mode_inverses() {
    const auto cfg = DimensionConfig::make(6);
    const PiProfile pi(cfg);
    Mode0InverseOptions o0;
    o0.R = 20.0;
    const Mode0Inverse H = mode0_inverse([&](double r) { return pi(r); }, cfg, o0);
    const double c = H(0.0) / kernel_Z0(0.0, cfg);
    const auto g = [](double r) { return std::exp(-r * r) * (1.0 - r * r); };
    const Mode1Inverse phi = mode1_inverse(g, o0.R, cfg);
    const oracle::Bubble b{6};
    double res0 = 0.0, res1 = 0.0;
    for (double r = 0.1; r < 1.8 * o0.R; r += 0.37) {
        const double h = 3e-3 * std::max(1.0, r);
        auto m0 = [&](double s) { return H(s) - c * kernel_Z0(s, cfg); };
        res0 = std::max(res0, std::abs(oracle::radial_laplacian(m0, r, 6, h) + b.p() * b.potential(r) * m0(r) + pi(r)));
        auto m1 = [&](double s) { return bubble_dU(s, cfg) * phi.factor_change(r, s); };
        res1 = std::max(res1, std::abs(oracle::radial_laplacian(m1, r, 6, h) - 5.0 / (r * r) * m1(r) +
                                       b.p() * b.potential(r) * m1(r) + g(r)));
    }
    const CorrectionH hc(cfg);
    const double k = (H(0.0) + hc.value(0.0)) / kernel_Z0(0.0, cfg);
    double gap = 0.0, size = 0.0;
    for (double r = 0.0; r < 2.0 * o0.R; r += 0.25) {
        gap = std::max(gap, std::abs(H(r) + hc.value(r) - k * kernel_Z0(r, cfg)));
        size = std::max(size, std::abs(hc.value(r)));
    }
    return {res0 < 1e-5 && res1 < 1e-5 && gap < 1e-5 * size,
            fmt::format("mode-0 round trip {:.2e}, mode-1 round trip {:.2e}, |H + h - cZ0|/|h| {:.2e} (all tol 1e-5), "
                        "R = 20",
                        res0, res1, gap / size)};
}

Verdict solver_validation() {
    const auto cfg = DimensionConfig::make(6);
    const Domain dom;
    // ODE mode: u' = u², u(0) = 2
    double ode = 0.0;
    {
        Physics phys;
        phys.diffusion = false;
        Stepper s(AxiField::sample(PdeGrid::build(dom, {16, 0.0, 0.0}, {12, 0.0, 0.0}), 0.0,
                                   [](AxiPoint) { return 2.0; }),
                  cfg, phys);
        while (s.field().t < 0.45) {
            s.step(std::min(1e-3, 0.45 - s.field().t));
            ode = std::max(ode, std::abs(s.field().at(5, 3) * (0.5 - s.field().t) - 1.0));
        }
    }
    // manufactured solution e^{-t} sin(π(x1-1)/1.5) cos(πρ/3)
    const double a = M_PI / 1.5, bb = M_PI / 3.0;
    auto exact = [&](AxiPoint x, double t) { return std::exp(-t) * std::sin(a * (x.x1 - 1.0)) * std::cos(bb * x.rho); };
    auto error = [&](int N) {
        Physics phys;
        phys.source = [&](AxiPoint x, double t) {
            const double e = std::exp(-t), S = std::sin(a * (x.x1 - 1.0)), C = std::cos(a * (x.x1 - 1.0));
            const double cr = std::cos(bb * x.rho), sr = std::sin(bb * x.rho);
            const double u = e * S * cr;
            const double radial = x.rho > 0.0 ? -bb * bb * u - 4.0 / x.rho * e * S * bb * sr : -5.0 * bb * bb * u;
            return -u - (-a * a * u + e * a * C * cr / x.x1 + radial) - u * u;
        };
        const PdeGrid g = PdeGrid::build(dom, AxisSpec::with_min_spacing(1.0, 2.5, N, 1.2, 0.5 / N),
                                         AxisSpec::with_min_spacing(0.0, 1.5, N, 0.0, 0.5 / N));
        Stepper s(AxiField::sample(g, 0.0, [&](AxiPoint x) { return exact(x, 0.0); }), cfg, phys);
        for (int k = 0; k < N; ++k) s.step(0.5 / N);
        double err = 0.0;
        for (std::size_t i = 0; i < g.nx(); ++i)
            for (std::size_t j = 0; j < g.nr(); ++j)
                err = std::max(err, std::abs(s.field().at(i, j) - exact({g.x1[i], g.rho[j]}, 0.5)));
        return err;
    };
    std::vector<double> errs;
    for (int N : {16, 32, 64, 128}) errs.push_back(error(N));
    double min_order = 1e9;
    std::string orders;
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double o = order(errs[k - 1], errs[k]);
        min_order = std::min(min_order, o);
        orders += fmt::format("{}{:.2f}", k > 1 ? ", " : "", o);
    }
    // synthetic traces
    double fit_err = 0.0;
    std::string fits;
    for (double gamma : {3.0, 1.0}) {
        RunTrace tr;
        for (int k = 0; k < 60; ++k) {
            RunRecord r;
            r.t = 1e-2 * (1.0 - std::pow(0.9, k));
            r.sup_u = std::pow(1e-2 - r.t, -gamma);
            tr.records.push_back(r);
        }
        const RateFit f = fit_rate(tr, {}, cfg);
        fit_err = std::max(fit_err, std::abs(f.exponent - gamma));
        fits += fmt::format("{}{:.6f}", fits.empty() ? "" : ", ", f.exponent);
    }
    return {ode < 1e-6 && min_order >= 1.8 && fit_err <= 0.01,
            fmt::format("ODE mode {:.2e} to 0.9 t_blowup (tol 1e-6); manufactured orders {} (min 1.8); fitted "
                        "exponents {} for 3, 1 (tol 0.01)",
                        ode, orders, fits)};
}

Verdict end_to_end() {
    const auto cfg = DimensionConfig::make(6);
    const double T = 1e-2;
    const Ansatz an(cfg, T);
    const RunOptions opts;
    const RunTrace tr = run_from_ansatz(an, Domain::from(an.geometry()), opts);
    const double window = opts.stop_fraction * T;
    double worst = 1.0, left = -1.0;
    for (const auto& r : tr.records) {
        const double q = r.lam_num / r.lam0;
        const double off = std::max(q, 1.0 / q);
        worst = std::max(worst, off);
        if (off > 2.0 && left < 0.0) left = r.t;
    }
    const double t_last = tr.records.back().t;
    const bool covered = t_last >= window;
    std::string fit;
    try {
        const RateFit f = fit_rate(tr, {}, cfg);
        fit = fmt::format("fitted exponent {:.3f} +- {:.3f} over {} records (Type I {}, Type II {})", f.exponent,
                          f.stderr_, f.records, f.typeI, f.typeII);
    } catch (const std::exception& e) {
        fit = fmt::format("rate fit unavailable: {}", e.what());
    }
    const bool pass = covered && worst <= 2.0;
    return {pass, fmt::format("run stopped ({}) at t = {:.3e} of the window T/4 = {:.3e}; max lambda ratio {:.2f} "
                              "(max 2){}; {}",
                              tr.reason, t_last, window, worst,
                              left >= 0.0 ? fmt::format(", band left at t = {:.3e}", left) : std::string{}, fit)};
}

}  // namespace

int main() {
    report(1, "bubble exactness", bubble_exactness);
    report(2, "integral identity", integral_identity);
    report(3, "scaling law", scaling_law);
    report(4, "correction h", correction_profile);
    report(5, "spectrum", spectrum);
    report(6, "coercivity", coercivity);
    report(7, "designed cancellation", cancellation);
    report(8, "residual norm scan", residual_scan);
    report(9, "mode inverses", mode_inverses);
    report(10, "solver validation", solver_validation);
    report(11, "end-to-end tracking", end_to_end);
    fmt::print("{} of 11 criteria failed\n", failures);
    return failures;
}

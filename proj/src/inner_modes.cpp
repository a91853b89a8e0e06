#include "blowup/inner_modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <lapacke.h>

#include "blowup/errors.hpp"
#include "blowup/quadrature.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

namespace {

// Sphere rule: directions (unit vectors, n components each) and weights
// summing to |S^{n-1}|.
struct SphereRule {
    int dim = 0;
    std::vector<double> dirs;
    std::vector<double> weights;
    [[nodiscard]] std::size_t size() const { return weights.size(); }
    [[nodiscard]] std::span<const double> dir(std::size_t k) const {
        return {dirs.data() + k * dim, static_cast<std::size_t>(dim)};
    }
};

// Polar angle from e1 only: the axisymmetric reduction. Gauss-Gegenbauer in
// cos θ absorbs the sin^{n-2}θ weight, so polynomial harmonics are exact.
SphereRule axisymmetric_rule(int m, int n) {
    const auto g = gauss_gegenbauer_rule(m, 0.5 * (n - 2));
    const double ring = sphere_area(n - 1);
    SphereRule s{2, {}, {}};
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        s.dirs.push_back(g.nodes[i]);
        s.dirs.push_back(std::sqrt(1.0 - g.nodes[i] * g.nodes[i]));
        s.weights.push_back(g.weights[i] * ring);
    }
    return s;
}

// Hyperspherical product rule: polar angle k carries sin^{n-2-k}, handled by
// Gauss-Gegenbauer in its cosine; azimuth by the trapezoid rule.
SphereRule product_rule(int m, int n) {
    const int azimuth = 2 * m;
    const int polar = n - 2;
    std::vector<GaussRule> g;
    for (int k = 0; k < polar; ++k) g.push_back(gauss_gegenbauer_rule(m, 0.5 * (n - 2 - k)));
    SphereRule s{n, {}, {}};
    std::vector<int> idx(static_cast<std::size_t>(polar), 0);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (;;) {
        double w = 2.0 * std::numbers::pi / azimuth;
        double sin_prod = 1.0;
        for (int k = 0; k < polar; ++k) {
            const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
            const double c = g[static_cast<std::size_t>(k)].nodes[i];
            y[static_cast<std::size_t>(k)] = sin_prod * c;
            w *= g[static_cast<std::size_t>(k)].weights[i];
            sin_prod *= std::sqrt(1.0 - c * c);
        }
        for (int a = 0; a < azimuth; ++a) {
            const double ph = 2.0 * std::numbers::pi * a / azimuth;
            y[static_cast<std::size_t>(n - 2)] = sin_prod * std::cos(ph);
            y[static_cast<std::size_t>(n - 1)] = sin_prod * std::sin(ph);
            s.dirs.insert(s.dirs.end(), y.begin(), y.end());
            s.weights.push_back(w);
        }
        int k = polar - 1;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == m) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
    }
    return s;
}

// Trapezoid weights in r with the r^{n-1} Jacobian; one radius means a bare sphere.
std::vector<double> shell_weights(std::span<const double> radii, int n) {
    std::vector<double> w(radii.size(), 0.0);
    if (radii.size() == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        const double h = 0.5 * (radii[i + 1] - radii[i]);
        w[i] += h * std::pow(radii[i], n - 1);
        w[i + 1] += h * std::pow(radii[i + 1], n - 1);
    }
    return w;
}

// Evaluator of the field at radius r in sphere direction k.
using ShellEval = std::function<double(double, std::span<const double>)>;

ModeDecomposition decompose_with(const ShellEval& eval, const SphereRule& rule,
                                 std::span<const double> radii, int moments, const DimensionConfig& cfg) {
    const int n = cfg.n;
    const double area = sphere_area(n);
    const auto rw = shell_weights(radii, n);
    ModeDecomposition out;
    out.h0 = RadialProfile{"h0", n, {radii.begin(), radii.end()}, {}, {}, {}};
    out.h1.assign(static_cast<std::size_t>(n),
                  RadialProfile{"h1", n, {radii.begin(), radii.end()}, {}, {}, {}});
    for (int j = 0; j < n; ++j) out.h1[static_cast<std::size_t>(j)].name = fmt::format("h1_{}", j + 1);

    std::vector<double> vals(rule.size());
    std::vector<double> m1(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        double total = 0.0, avg = 0.0;
        std::fill(m1.begin(), m1.end(), 0.0);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            vals[k] = eval(r, rule.dir(k));
            const double w = rule.weights[k];
            total += w * vals[k] * vals[k];
            avg += w * vals[k];
            for (int j = 0; j < moments; ++j) m1[static_cast<std::size_t>(j)] += w * vals[k] * rule.dir(k)[j];
        }
        avg /= area;
        for (double& v : m1) v *= n / area;
        double perp = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
            double rest = vals[k] - avg;
            for (int j = 0; j < moments; ++j) rest -= m1[static_cast<std::size_t>(j)] * rule.dir(k)[j];
            perp += rule.weights[k] * rest * rest;
        }
        double mode1 = 0.0;
        for (double v : m1) mode1 += v * v;
        out.total_energy += rw[i] * total;
        out.mode0_energy += rw[i] * area * avg * avg;
        out.mode1_energy += rw[i] * area / n * mode1;
        out.hperp_energy += rw[i] * perp;
        out.h0.values.push_back(avg);
        for (int j = 0; j < n; ++j) out.h1[static_cast<std::size_t>(j)].values.push_back(m1[static_cast<std::size_t>(j)]);
    }
    if (out.total_energy > 0.0) {
        out.parseval_defect = std::abs(out.total_energy - out.mode0_energy - out.mode1_energy -
                                       out.hperp_energy) / out.total_energy;
    }
    return out;
}

void check_resolution(ModeDecomposition& fine, const ModeDecomposition& coarse) {
    if (!(fine.total_energy > 0.0)) return;
    const double d = std::max({std::abs(fine.total_energy - coarse.total_energy),
                               std::abs(fine.mode0_energy - coarse.mode0_energy),
                               std::abs(fine.mode1_energy - coarse.mode1_energy),
                               std::abs(fine.hperp_energy - coarse.hperp_energy)});
    fine.resolution_defect = d / fine.total_energy;
    if (fine.resolution_defect > 1e-2 || fine.parseval_defect > 1e-2) {
        throw NumericalError(fmt::format(
            "decompose: sphere lattice under-resolved (resolution defect {:.3g}, Parseval defect {:.3g})",
            fine.resolution_defect, fine.parseval_defect));
    }
}

void check_radii(const SphereSampling& s) {
    if (s.radii.empty()) throw ConfigError("decompose: no radii");
    if (s.angular < 2) throw ConfigError("decompose: need at least 2 angular nodes");
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
        if (s.radii[i] < 0.0 || (i > 0 && s.radii[i] <= s.radii[i - 1])) {
            throw ConfigError("decompose: radii must be nonnegative and increasing");
        }
    }
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    return den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

// {0} ∪ geometric nodes on [1e-3, edge], optionally continued geometrically to r_max.
std::vector<double> inverse_grid(double edge, int nodes, double r_max) {
    auto grid = geometric_grid(1e-3, edge, nodes);
    if (r_max > edge) {
        const double q = grid.back() / grid[grid.size() - 2];
        for (double r = edge * q; r < r_max * q; r *= q) grid.push_back(std::min(r, r_max));
        if (grid.back() != r_max) grid.back() = r_max;
    }
    return grid;
}

}  // namespace

ModeDecomposition decompose(const std::function<double(InnerPoint)>& field,
                            const SphereSampling& sampling, const DimensionConfig& cfg) {
    check_radii(sampling);
    const ShellEval eval = [&field](double r, std::span<const double> d) {
        return field(InnerPoint{r * d[0], r * d[1]});
    };
    auto fine = decompose_with(eval, axisymmetric_rule(sampling.angular, cfg.n), sampling.radii, 1, cfg);
    const auto coarse = decompose_with(eval, axisymmetric_rule(std::max(2, sampling.angular / 2), cfg.n),
                                       sampling.radii, 1, cfg);
    check_resolution(fine, coarse);
    return fine;
}

ModeDecomposition decompose(const std::function<double(std::span<const double>)>& field,
                            const SphereSampling& sampling, const DimensionConfig& cfg) {
    check_radii(sampling);
    std::vector<double> y(static_cast<std::size_t>(cfg.n));
    const ShellEval eval = [&](double r, std::span<const double> d) {
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = r * d[j];
        return field(y);
    };
    auto fine = decompose_with(eval, product_rule(sampling.angular, cfg.n), sampling.radii, cfg.n, cfg);
    const auto coarse = decompose_with(eval, product_rule(std::max(2, sampling.angular / 2), cfg.n),
                                       sampling.radii, cfg.n, cfg);
    check_resolution(fine, coarse);
    return fine;
}

namespace {

std::vector<double> checked_inverse_grid(const Mode0InverseOptions& opts) {
    if (!(opts.R > 0.0) || opts.nodes < 16 || opts.r_max_factor < 1.0) {
        throw ConfigError("mode0_inverse: need R > 0, nodes >= 16, r_max_factor >= 1");
    }
    return inverse_grid(2.0 * opts.R, opts.nodes, opts.r_max_factor * 2.0 * opts.R);
}

}  // namespace

Mode0Inverse::Mode0Inverse(RealFn h0, const DimensionConfig& cfg, const Mode0InverseOptions& opts)
    : cfg_(cfg),
      h0_(std::move(h0)),
      edge_(2.0 * opts.R),
      grid_(checked_inverse_grid(opts)),
      tz_(cfg, std::vector<double>(grid_.begin() + 1, grid_.end())),
      W_(tz_.wronskian()) {
    const int n = cfg_.n;
    I0_ = cumulative_integral(grid_, [&](double s) { return extended(s) * kernel_Z0(s, cfg_) * std::pow(s, n - 1); });
    I1_ = cumulative_integral(grid_, [&](double s) {
        return s > 0.0 ? extended(s) * tz_.value(s) * std::pow(s, n - 1) : 0.0;
    });
    const auto abs0 = cumulative_integral(grid_, [&](double s) {
        return std::abs(extended(s) * kernel_Z0(s, cfg_)) * std::pow(s, n - 1);
    });
    defect_ = abs0.back() > 0.0 ? std::abs(I0_.back()) / abs0.back() : 0.0;
    if (defect_ > opts.orthogonality_tol) {
        throw NumericalError(fmt::format("mode0_inverse: h0 not orthogonal to Z0 (defect {:.3g} > {:.3g})",
                                         defect_, opts.orthogonality_tol));
    }
    profile_ = RadialProfile{"H0", n, grid_, {}, {}, {}};
    double sup_H = 0.0, sup_h = 0.0;
    for (double r : grid_) {
        const double v = (*this)(r);
        profile_.values.push_back(v);
        profile_.slopes.push_back(derivative(r));
        sup_H = std::max(sup_H, (1.0 + std::pow(r, opts.a)) * std::abs(v));
        if (r <= edge_) sup_h = std::max(sup_h, (1.0 + std::pow(r, 2.0 + opts.a)) * std::abs(h0_(r)));
    }
    bound_ = sup_h > 0.0 ? sup_H / sup_h : 0.0;
}

double Mode0Inverse::extended(double s) const { return s <= edge_ ? h0_(s) : 0.0; }

Mode0Inverse::Pairings Mode0Inverse::pairings(double r) const {
    const int n = cfg_.n;
    const std::size_t i = locate_cell(grid_, std::min(r, grid_.back()));
    const double lo = grid_[i];
    const double hi = std::min(r, edge_);
    double z0 = I0_[i], zt = I1_[i];
    if (hi > lo) {
        z0 += gauss_legendre([&](double s) { return extended(s) * kernel_Z0(s, cfg_) * std::pow(s, n - 1); }, lo, hi);
        zt += gauss_legendre([&](double s) { return extended(s) * tz_.value(s) * std::pow(s, n - 1); }, lo, hi);
    }
    return {z0, I1_.back() - zt};
}

double Mode0Inverse::operator()(double r) const {
    const auto pr = pairings(r);
    if (r == 0.0) return -kernel_Z0(0.0, cfg_) * pr.with_tildeZ / W_;
    return -(tz_.value(r) * pr.with_Z0 + kernel_Z0(r, cfg_) * pr.with_tildeZ) / W_;
}

double Mode0Inverse::derivative(double r) const {
    if (r == 0.0) return 0.0;
    const auto pr = pairings(r);
    return -(tz_.derivative(r) * pr.with_Z0 + kernel_dZ0(r, cfg_) * pr.with_tildeZ) / W_;
}

Mode0Inverse mode0_inverse(const RealFn& h0, const DimensionConfig& cfg, const Mode0InverseOptions& opts) {
    return Mode0Inverse(h0, cfg, opts);
}

Mode0Inverse mode0_inverse(const RadialProfile& h0, const DimensionConfig& cfg,
                           const Mode0InverseOptions& opts) {
    return Mode0Inverse([h0](double r) { return h0(r); }, cfg, opts);
}

Mode1Inverse::Mode1Inverse(RealFn g, double R, const DimensionConfig& cfg, const Mode1InverseOptions& opts)
    : cfg_(cfg), g_(std::move(g)) {
    if (!(R > 0.0) || opts.nodes < 16) throw ConfigError("mode1_inverse: need R > 0, nodes >= 16");
    const int n = cfg_.n;
    grid_ = geometric_grid(1e-3, 2.0 * R, opts.nodes);
    I_ = cumulative_integral(grid_, [&](double s) { return g_(s) * bubble_dU(s, cfg_) * std::pow(s, n - 1); });
    // K[i] = ∫_0^{r_i}, anchored at the origin so increments near the core stay exact
    K_ = cumulative_integral(grid_, [&](double rho) { return outer_integrand(rho); });

    profile_ = RadialProfile{"phi1", n, grid_, {}, {}, {}};
    double sup = 0.0;
    for (double r : grid_) {
        const double v = (*this)(r), dv = derivative(r);
        if (!std::isfinite(v) || !std::isfinite(dv)) {
            throw NumericalError(fmt::format("mode1_inverse: quadrature breakdown at r = {}", r));
        }
        profile_.values.push_back(v);
        profile_.slopes.push_back(dv);
        sup = std::max(sup, std::abs(v) * (1.0 + std::pow(r, n - 1)));
    }
    bound_ = sup / std::pow(R, n - opts.a);
}

double Mode1Inverse::inner(double rho) const {
    const std::size_t i = locate_cell(grid_, rho);
    if (rho <= grid_[i]) return I_[i];
    return I_[i] + gauss_legendre([&](double s) {
        return g_(s) * bubble_dU(s, cfg_) * std::pow(s, cfg_.n - 1);
    }, grid_[i], rho);
}

double Mode1Inverse::outer_integrand(double rho) const {
    const double Z = bubble_dU(rho, cfg_);
    return inner(rho) / (std::pow(rho, cfg_.n - 1) * Z * Z);
}

double Mode1Inverse::from_origin(double r) const {
    r = std::min(r, grid_.back());
    const std::size_t i = locate_cell(grid_, r);
    if (r <= grid_[i]) return K_[i];
    return K_[i] + gauss_legendre([&](double rho) { return outer_integrand(rho); }, grid_[i], r);
}

double Mode1Inverse::factor(double r) const { return K_.back() - from_origin(r); }

double Mode1Inverse::factor_change(double a, double b) const { return from_origin(a) - from_origin(b); }

double Mode1Inverse::operator()(double r) const { return bubble_dU(r, cfg_) * factor(r); }

double Mode1Inverse::derivative(double r) const {
    double dv = bubble_d2U(r, cfg_) * factor(r);
    if (r > 0.0) dv -= inner(r) / (std::pow(r, cfg_.n - 1) * bubble_dU(r, cfg_));
    return dv;
}

Mode1Inverse mode1_inverse(const RealFn& g, double R, const DimensionConfig& cfg,
                           const Mode1InverseOptions& opts) {
    return Mode1Inverse(g, R, cfg, opts);
}

double apply_L0_fd(const RealFn& f, double r, const DimensionConfig& cfg, double h) {
    const double fm2 = f(r - 2 * h), fm = f(r - h), f0 = f(r), fp = f(r + h), fp2 = f(r + 2 * h);
    const double d2 = (-fp2 + 16.0 * fp - 30.0 * f0 + 16.0 * fm - fm2) / (12.0 * h * h);
    const double d1 = (-fp2 + 8.0 * fp - 8.0 * fm + fm2) / (12.0 * h);
    return d2 + (cfg.n - 1) * d1 / r + cfg.p * bubble_potential(r, cfg) * f0;
}

double apply_L1_fd(const RealFn& f, double r, const DimensionConfig& cfg, double h) {
    return apply_L0_fd(f, r, cfg, h) - (cfg.n - 1) * f(r) / (r * r);
}

void ParabolicSolution::write_trace_csv(std::ostream& os) const {
    os << "tau,c,sup_weighted_phi\n";
    for (const auto& rec : trace) os << fmt::format("{:.17g},{:.17g},{:.17g}\n", rec.tau, rec.c, rec.sup_weighted_phi);
}

ParabolicSolution mode0_parabolic(const RadialForcing& h0, double R, double tau0, double tau_end,
                                  const DimensionConfig& cfg, const ParabolicOptions& opts) {
    if (!(tau0 > 0.0) || !(tau_end > tau0) || !(R > 0.0)) {
        throw ConfigError("mode0_parabolic: need 0 < tau0 < tau_end and R > 0");
    }
    if (opts.z_radius_factor < 1.0) throw ConfigError("mode0_parabolic: z_radius_factor must be >= 1");
    const int n = cfg.n;
    const double edge = 2.0 * R;
    const double omega = sphere_area(n);
    const double nu = opts.norm.nu(n);
    const auto op = RadialOperator::build(cfg, edge, opts.cells, opts.grading);
    const std::size_t N = op.nodes.size();
    const auto& r = op.nodes;

    // Projection direction: the ground state of the solver's own operator, so
    // ∫φZ = 0 holds to rounding. The ground state of a larger ball supplies
    // Z(2R) for the boundary term of the continuum relation.
    const auto ground = negative_eigenpair(cfg, opts.z_radius_factor * edge, opts.z_cells);
    const double mu_grid = op.lowest_eigenvalues(1)[0];
    auto z = op.eigenvector(1.1 * mu_grid);
    {
        const double zi = ground.Z(r[0]);
        const double scale = zi / z[0];
        for (double& v : z) v *= scale;
    }
    const double z_edge = ground.Z(edge);
    const auto pair = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) acc += omega * op.volume[i] * u[i] * v[i];
        return acc;
    };
    const double z_sq = pair(z, z);

    // ∂rφ at r = 2R from φ(2R) = 0 and the last two nodes (second order)
    const double a1 = edge - r[N - 1], a2 = edge - r[N - 2];
    const auto edge_slope = [&](const std::vector<double>& u) {
        return (u[N - 1] * a2 * a2 - u[N - 2] * a1 * a1) / (a1 * a2 * (a1 - a2));
    };
    const double flux_area = omega * std::pow(edge, n - 1);

    // (M + dt A) x = M b with A = M^{1/2} S M^{1/2}
    std::vector<double> dl(N - 1), d(N), du(N - 1);
    const auto solve = [&](std::vector<double> b, double dt) {
        for (std::size_t i = 0; i < N; ++i) {
            d[i] = op.volume[i] * (1.0 + dt * op.diag[i]);
            b[i] *= op.volume[i];
            if (i + 1 < N) dl[i] = du[i] = dt * op.offdiag[i] * std::sqrt(op.volume[i] * op.volume[i + 1]);
        }
        const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(N), 1, dl.data(),
                                              d.data(), du.data(), b.data(), static_cast<lapack_int>(N));
        if (info != 0) throw NumericalError(fmt::format("mode0_parabolic: dgtsv info = {}", info));
        return b;
    };
    struct Step {
        std::vector<double> u;
        double c = 0.0;
    };
    // Backward Euler with h frozen at tau and c fixed by ∫u'Z = 0.
    const auto implicit_step = [&](const std::vector<double>& u, double tau, double dt) {
        std::vector<double> b(N);
        for (std::size_t i = 0; i < N; ++i) b[i] = u[i] + dt * h0(r[i], tau);
        auto free = solve(std::move(b), dt);
        std::vector<double> zb(N);
        for (std::size_t i = 0; i < N; ++i) zb[i] = dt * z[i];
        const auto resp = solve(std::move(zb), dt);
        Step st{std::move(free), 0.0};
        if (!opts.project) return st;
        st.c = pair(st.u, z) / pair(resp, z);
        for (std::size_t i = 0; i < N; ++i) st.u[i] -= st.c * resp[i];
        return st;
    };

    ParabolicSolution sol;
    sol.mu0 = mu_grid;
    sol.Z = RadialProfile{"Z", n, r, z, {}, {}};
    sol.Z.grid.push_back(edge);
    sol.Z.values.push_back(0.0);
    std::vector<double> u(N, 0.0), hv(N);
    const auto record = [&](double tau, double c) {
        ParabolicRecord rec;
        rec.tau = tau;
        rec.c = c;
        for (std::size_t i = 0; i < N; ++i) hv[i] = h0(r[i], tau);
        rec.pairing = pair(hv, z) / z_sq;
        rec.c_cc = rec.pairing + flux_area * edge_slope(u) * z_edge / z_sq;
        for (std::size_t i = 0; i < N; ++i) {
            rec.sup_phi = std::max(rec.sup_phi, std::abs(u[i]));
            rec.sup_weighted_phi =
                std::max(rec.sup_weighted_phi, (1.0 + std::pow(r[i], opts.norm.a)) * std::abs(u[i]));
        }
        rec.sup_weighted_phi *= std::pow(tau, nu);
        rec.z_mass = pair(u, z) / z_sq;
        sol.sup_weighted_phi = std::max(sol.sup_weighted_phi, rec.sup_weighted_phi);
        sol.trace.push_back(rec);
    };

    double tau = tau0;
    double dt = std::min(opts.dt_initial, tau_end - tau0);
    record(tau, implicit_step(u, tau, dt).c);
    int consecutive = 0;
    while (tau < tau_end) {
        dt = std::min(dt, tau_end - tau);
        const auto full = implicit_step(u, tau, dt);
        const auto half = implicit_step(u, tau, 0.5 * dt);
        const auto half2 = implicit_step(half.u, tau + 0.5 * dt, 0.5 * dt);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            err = std::max(err, std::abs(half2.u[i] - full.u[i]));
            scale = std::max(scale, std::abs(half2.u[i]));
        }
        const double tol = opts.atol + opts.rtol * scale;
        if (err > tol) {
            ++sol.rejections;
            if (++consecutive > opts.max_rejections || dt < opts.dt_min) {
                throw NumericalError(fmt::format("mode0_parabolic: step rejected {} times at tau = {} (dt = {:.3g})",
                                                 consecutive, tau, dt));
            }
            dt *= std::max(0.2, 0.9 * std::sqrt(tol / err));
            continue;
        }
        consecutive = 0;
        for (std::size_t i = 0; i < N; ++i) u[i] = 2.0 * half2.u[i] - full.u[i];
        tau += dt;
        ++sol.steps;
        record(tau, 0.5 * (half.c + half2.c));
        dt *= err > 0.0 ? std::clamp(0.9 * std::sqrt(tol / err), 0.2, 2.0) : 2.0;
    }

    // Exponential rate of the growth of sup|φ|: log-slope of its τ-derivative
    // over the second half of the run (0 for linear growth, κ for e^{κτ}).
    const double mid = 0.5 * (tau0 + tau_end);
    double peak = 0.0;
    for (const auto& rec : sol.trace) peak = std::max(peak, rec.sup_phi);
    std::vector<double> xs, ys;
    for (std::size_t k = 1; k < sol.trace.size(); ++k) {
        const auto& a0 = sol.trace[k - 1];
        const auto& a1 = sol.trace[k];
        if (a0.tau < mid || peak < 1e-12) continue;
        const double rate = std::abs(a1.sup_phi - a0.sup_phi) / (a1.tau - a0.tau);
        if (rate > 0.0) {
            xs.push_back(0.5 * (a0.tau + a1.tau));
            ys.push_back(std::log(rate));
        }
    }
    if (xs.size() >= 2) sol.growth_rate = least_squares_slope(xs, ys);

    sol.phi = RadialProfile{"phi0", n, r, u, {}, {}};
    sol.phi.grid.push_back(edge);
    sol.phi.values.push_back(0.0);
    return sol;
}

}  // namespace blowup

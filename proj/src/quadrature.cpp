#include "blowup/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>
#include <lapacke.h>

#include "blowup/errors.hpp"

namespace blowup {

namespace bq = boost::math::quadrature;

double sphere_area(int n) {
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double gauss_legendre(const RealFn& f, double a, double b) {
    return bq::gauss<double, 20>::integrate(f, a, b);
}

QuadResult half_line_integral(const RealFn& f, const QuadOptions& opts) {
    const auto mapped = [&f](double s) {
        const double q = 1.0 - s;
        return f(s / q) / (q * q);
    };
    double fine = 0.0, coarse = 0.0, last_panel = 0.0;
    const auto panel = [&](double a, double b) {
        const double v20 = bq::gauss<double, 20>::integrate(mapped, a, b);
        const double v10 = bq::gauss<double, 10>::integrate(mapped, a, b);
        fine += v20;
        coarse += v10;
        return v20;
    };
    for (int k = 0; k < opts.inner_panels; ++k) {
        panel(0.5 * k / opts.inner_panels, 0.5 * (k + 1) / opts.inner_panels);
    }
    for (int k = 1; k <= opts.dyadic_panels; ++k) {
        last_panel = panel(1.0 - std::ldexp(1.0, -k), 1.0 - std::ldexp(1.0, -k - 1));
    }
    QuadResult res;
    res.value = fine;
    res.error = std::abs(fine - coarse) + 2.0 * std::abs(last_panel);
    res.converged = res.error <= opts.rel_tol * std::abs(fine) + opts.abs_tol;
    return res;
}

QuadResult radial_integral(const RealFn& f, const DimensionConfig& cfg, const QuadOptions& opts) {
    const int n = cfg.n;
    auto res = half_line_integral([&f, n](double r) { return f(r) * std::pow(r, n - 1); }, opts);
    const double w = sphere_area(n);
    res.value *= w;
    res.error *= w;
    return res;
}

QuadResult radial_integral(const RadialProfile& f, const DimensionConfig& cfg,
                           const QuadOptions& opts) {
    return radial_integral([&f](double r) { return f(r); }, cfg, opts);
}

GaussRule gauss_gegenbauer_rule(int points, double lambda) {
    if (points < 1) throw ConfigError("gauss rule: need at least one point");
    if (!(lambda > -0.5)) throw ConfigError("gauss_gegenbauer_rule: need lambda > -1/2");
    // monic recurrence x p_k = p_{k+1} + b_k p_{k-1}, b_k = k(k+2λ-1)/(4(k+λ)(k+λ-1))
    std::vector<double> diag(points, 0.0), off(std::max(points - 1, 1), 0.0);
    for (int k = 1; k < points; ++k) {
        off[k - 1] = std::sqrt(k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0)));
    }
    std::vector<double> vecs(std::size_t(points) * points);
    const int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', points, diag.data(), off.data(), vecs.data(), points);
    if (info != 0) throw NumericalError(fmt::format("gauss rule: dstev info = {}", info));
    const double mass = std::sqrt(std::numbers::pi) * std::tgamma(lambda + 0.5) / std::tgamma(lambda + 1.0);
    GaussRule rule{diag, std::vector<double>(points)};
    for (int i = 0; i < points; ++i) {
        const double v0 = vecs[std::size_t(i) * points];
        rule.weights[i] = mass * v0 * v0;
    }
    return rule;
}

GaussRule gauss_legendre_rule(int points) { return gauss_gegenbauer_rule(points, 0.5); }

std::vector<double> cumulative_integral(std::span<const double> grid, const RealFn& f,
                                        std::size_t anchor) {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = anchor + 1; i < grid.size(); ++i) {
        out[i] = out[i - 1] + bq::gauss<double, 10>::integrate(f, grid[i - 1], grid[i]);
    }
    for (std::size_t i = anchor; i-- > 0;) {
        out[i] = out[i + 1] - bq::gauss<double, 10>::integrate(f, grid[i], grid[i + 1]);
    }
    return out;
}

}  // namespace blowup

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "blowup/dimension.hpp"
#include "blowup/radial_profile.hpp"

namespace blowup {

using RealFn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;     ///< |coarse - fine| plus tail estimate
    bool converged = true;  ///< error within the requested tolerance
};

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int dyadic_panels = 44;  ///< panels [1-2^-k, 1-2^-(k+1)] toward s = 1 (r ~ 2^k)
    int inner_panels = 8;    ///< uniform panels on s in [0, 1/2]
};

/// Surface measure of the unit sphere S^{n-1}.
[[nodiscard]] double sphere_area(int n);

/// 20-point Gauss-Legendre on [a, b].
[[nodiscard]] double gauss_legendre(const RealFn& f, double a, double b);

/// Integral over R^n of a radial function, omega_{n-1} * int_0^inf f r^{n-1} dr.
/// Uses r = s/(1-s) with Gauss-Legendre panels graded toward s = 1.
[[nodiscard]] QuadResult radial_integral(const RealFn& f, const DimensionConfig& cfg,
                                         const QuadOptions& opts = {});
[[nodiscard]] QuadResult radial_integral(const RadialProfile& f, const DimensionConfig& cfg,
                                         const QuadOptions& opts = {});

/// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1]
/// (eigen-decomposition of the Jacobi matrix).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] GaussRule gauss_legendre_rule(int points);
/// Gauss rule on [-1, 1] for the weight (1 - x²)^{λ - 1/2}.
[[nodiscard]] GaussRule gauss_gegenbauer_rule(int points, double lambda);

/// One-dimensional integral over [0, inf) with the same mapping (no r^{n-1}).
[[nodiscard]] QuadResult half_line_integral(const RealFn& f, const QuadOptions& opts = {});

/// F[i] = int_{grid[anchor]}^{grid[i]} f, 10-point Gauss-Legendre per cell.
[[nodiscard]] std::vector<double> cumulative_integral(std::span<const double> grid, const RealFn& f,
                                                      std::size_t anchor = 0);

}  // namespace blowup

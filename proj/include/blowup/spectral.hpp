#pragma once

#include <span>
#include <vector>

#include "blowup/dimension.hpp"
#include "blowup/radial_profile.hpp"

namespace blowup {

/// Second radial kernel solution of Δφ + pU^{p-1}φ = 0, built from Z0 by
/// reduction of order. The double pole of 1/(r^{n-1}Z0^2) at the zero r = 1
/// of Z0 is removed analytically (its simple-pole residue vanishes), so the
/// remaining integrand is smooth. Normalized so that Z̃ -> 1 at infinity.
class TildeZ {
public:
    /// `grid` must be strictly increasing and positive (Z̃ is singular at 0).
    TildeZ(const DimensionConfig& cfg, std::vector<double> grid);

    [[nodiscard]] double value(double r) const;
    [[nodiscard]] double derivative(double r) const;
    /// r^{n-1}(Z0 Z̃' - Z0' Z̃), constant in r.
    [[nodiscard]] double wronskian() const { return 1.0 / norm_; }
    [[nodiscard]] RadialProfile profile() const;

private:
    [[nodiscard]] double integrand(double s) const;
    [[nodiscard]] double antiderivative(double r) const;

    DimensionConfig cfg_;
    std::vector<double> grid_;
    std::vector<double> g_;  // finite-part antiderivative at grid nodes
    double pole_ = 0.0;      // coefficient of the double pole at r = 1
    double far_coeff_ = 0.0; // Z̃ ~ 1 + far_coeff / r^2
    double norm_ = 1.0;
};

[[nodiscard]] RadialProfile tilde_Z(const DimensionConfig& cfg, std::span<const double> grid);

/// Radial finite-volume discretization of -Δ - pU^{p-1} on a ball with
/// Dirichlet data, written as the symmetric tridiagonal M^{-1/2} A M^{-1/2}.
struct RadialOperator {
    std::vector<double> nodes;   ///< r_0 = 0 < ... < r_{N-1}; r_N = radius carries the Dirichlet value
    std::vector<double> volume;  ///< control-volume weights int r^{n-1} dr
    std::vector<double> diag;
    std::vector<double> offdiag;
    double radius = 0.0;

    /// Grid r(ξ) = radius sinh(βξ)/sinh(β) with `cells` uniform steps in ξ.
    static RadialOperator build(const DimensionConfig& cfg, double radius, int cells,
                                double grading = 4.0);

    /// The k lowest eigenvalues (ascending).
    [[nodiscard]] std::vector<double> lowest_eigenvalues(int k) const;
    /// Physical-space eigenvector (u_i, not M^{1/2}u) by shifted inverse iteration.
    [[nodiscard]] std::vector<double> eigenvector(double shift, std::span<const double> deflate = {},
                                                  int iterations = 60) const;
};

struct EigenPair {
    double mu0 = 0.0;            ///< lowest eigenvalue of -Δ - pU^{p-1} (negative)
    double gap = 0.0;            ///< (mu1 - mu0)/|mu0|
    double decay_rate = 0.0;     ///< fitted exponential rate of the tail
    double residual = 0.0;       ///< ||L0 Z + mu0 Z||_inf / ||Z||_inf on the discrete operator
    RadialProfile Z;             ///< positive, int_{ball} Z^2 = 1
};

/// Lowest eigenpair on the ball of radius `radius` with `cells` cells.
[[nodiscard]] EigenPair negative_eigenpair(const DimensionConfig& cfg, double radius = 40.0,
                                           int cells = 4000);

struct CoercivityResult {
    double gamma_R = 0.0;            ///< R^{n-2} times the constrained minimum
    double constrained_min = 0.0;    ///< min Q on the Z-orthogonal complement, ∫φ^2 = 1
    double unconstrained_min = 0.0;  ///< ground-state value (negative)
    double projection_overlap = 0.0; ///< |<φ_min, Z>| for the constrained minimizer
};

/// Minimum of the quadratic form Q on radial functions over B_{2R}, with and
/// without orthogonality to the ground state. Richardson-extrapolated from
/// `cells` and 2*`cells`.
[[nodiscard]] CoercivityResult coercivity_constant(const DimensionConfig& cfg, double R,
                                                   int cells = 4000);

}  // namespace blowup

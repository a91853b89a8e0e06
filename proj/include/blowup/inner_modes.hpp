#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "blowup/core_bubble.hpp"
#include "blowup/residual.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

/// Radii and sphere resolution for decompose(). `angular` is the number of
/// Gauss nodes in each polar angle; the azimuth (general path) uses 2·angular
/// trapezoid nodes.
struct SphereSampling {
    std::vector<double> radii;
    int angular = 32;
};

/// h = h0(r) + Σ_j h1_j(r) y_j/r + h⊥ on the sampled spheres. Energies are
/// L² masses over the sampled shell (trapezoid in r with weight r^{n-1}; a
/// single radius gives the sphere integral).
struct ModeDecomposition {
    RadialProfile h0;               ///< spherical average
    std::vector<RadialProfile> h1;  ///< j = 1..n, first moments n·avg(h y_j/r)
    double total_energy = 0.0;
    double mode0_energy = 0.0;
    double mode1_energy = 0.0;
    double hperp_energy = 0.0;      ///< measured directly from h - h0 - h1-part
    double parseval_defect = 0.0;   ///< |total - modes - hperp| / total
    double resolution_defect = 0.0; ///< largest energy change against a half-resolution lattice
};

/// Axisymmetric field h(y1, |ȳ|): only h1_1 can be nonzero, the sphere
/// reduces to the polar angle from e1. Throws NumericalError when the
/// half-resolution lattice moves an energy by more than 1% of the total.
[[nodiscard]] ModeDecomposition decompose(const std::function<double(InnerPoint)>& field,
                                          const SphereSampling& sampling,
                                          const DimensionConfig& cfg);
/// General field on R^n, hyperspherical product rule.
[[nodiscard]] ModeDecomposition decompose(const std::function<double(std::span<const double>)>& field,
                                          const SphereSampling& sampling,
                                          const DimensionConfig& cfg);

struct Mode0InverseOptions {
    double R = 20.0;                  ///< h0 is extended by zero outside B_{2R}
    int nodes = 1536;                 ///< geometric nodes on [1e-3, 2R]
    double r_max_factor = 2.0;        ///< profile extends to r_max_factor·2R
    double orthogonality_tol = 1e-2;  ///< on |∫h̃Z0| / ∫|h̃Z0|
    double a = 0.3;                   ///< weight exponent of the reported bound
};

/// Radial H with ΔH + pU^{p-1}H + h̃0 = 0, in the regular form
/// H = -(1/W)[Z̃ ∫_0^r h̃Z0 s^{n-1} + Z0 ∫_r^{2R} h̃Z̃ s^{n-1}], W the
/// Wronskian r^{n-1}(Z0 Z̃' - Z0' Z̃). Pointwise values come from cumulative
/// tables plus a Gauss-Legendre partial cell, so they stay accurate between
/// nodes. Throws NumericalError when the Z0-orthogonality of h̃0 fails.
class Mode0Inverse {
public:
    Mode0Inverse(RealFn h0, const DimensionConfig& cfg, const Mode0InverseOptions& opts = {});

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] double derivative(double r) const;
    /// Samples with slopes on [0, r_max_factor·2R].
    [[nodiscard]] const RadialProfile& profile() const { return profile_; }
    /// |∫h̃Z0| / ∫|h̃Z0|
    [[nodiscard]] double orthogonality_defect() const { return defect_; }
    /// sup (1+r^a)|H| / sup (1+r^{2+a})|h0| over the nodes
    [[nodiscard]] double bound_constant() const { return bound_; }

private:
    struct Pairings {
        double with_Z0 = 0.0;      // ∫_0^r h̃Z0 s^{n-1}
        double with_tildeZ = 0.0;  // ∫_r^{2R} h̃Z̃ s^{n-1}
    };
    [[nodiscard]] Pairings pairings(double r) const;
    [[nodiscard]] double extended(double s) const;

    DimensionConfig cfg_;
    RealFn h0_;
    double edge_ = 0.0;
    std::vector<double> grid_;
    TildeZ tz_;
    double W_ = 0.0;
    std::vector<double> I0_, I1_;
    RadialProfile profile_;
    double defect_ = 0.0;
    double bound_ = 0.0;
};

[[nodiscard]] Mode0Inverse mode0_inverse(const RealFn& h0, const DimensionConfig& cfg,
                                         const Mode0InverseOptions& opts = {});
[[nodiscard]] Mode0Inverse mode0_inverse(const RadialProfile& h0, const DimensionConfig& cfg,
                                         const Mode0InverseOptions& opts = {});

struct Mode1InverseOptions {
    int nodes = 1536;
    double a = 0.3;
};

/// Solution of ℒ1φ + g = 0 on (0, 2R), ℒ1 = ∂rr + (n-1)/r ∂r - (n-1)/r² + pU^{p-1},
/// by reduction of order on Z = U':
/// φ = Z ∫_r^{2R} (ρ^{n-1}Z²)^{-1} ∫_0^ρ g Z s^{n-1}, so φ(2R) = 0.
class Mode1Inverse {
public:
    Mode1Inverse(RealFn g, double R, const DimensionConfig& cfg, const Mode1InverseOptions& opts = {});

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] double derivative(double r) const;
    /// φ/Z, the outer integral of the reduction of order.
    [[nodiscard]] double factor(double r) const;
    /// factor(b) - factor(a) without the cancellation of two O(R^n) values.
    [[nodiscard]] double factor_change(double a, double b) const;
    [[nodiscard]] const RadialProfile& profile() const { return profile_; }
    /// sup |φ|(1 + r^{n-1}) / R^{n-a} over the nodes
    [[nodiscard]] double bound_constant() const { return bound_; }

private:
    [[nodiscard]] double inner(double rho) const;
    [[nodiscard]] double outer_integrand(double rho) const;
    [[nodiscard]] double from_origin(double r) const;

    DimensionConfig cfg_;
    RealFn g_;
    std::vector<double> grid_, I_, K_;
    RadialProfile profile_;
    double bound_ = 0.0;
};

[[nodiscard]] Mode1Inverse mode1_inverse(const RealFn& g, double R, const DimensionConfig& cfg,
                                         const Mode1InverseOptions& opts = {});

/// (ℒ0 f)(r) and (ℒ1 f)(r) by fourth-order centered differences with step h.
[[nodiscard]] double apply_L0_fd(const RealFn& f, double r, const DimensionConfig& cfg, double h);
[[nodiscard]] double apply_L1_fd(const RealFn& f, double r, const DimensionConfig& cfg, double h);

using RadialForcing = std::function<double(double r, double tau)>;

struct ParabolicOptions {
    int cells = 800;
    double grading = 3.0;
    double z_radius_factor = 2.0;  ///< ball B_{factor·2R} whose ground state gives Z(2R) in c_cc
    int z_cells = 4000;
    double rtol = 1e-6;
    double atol = 1e-12;
    double dt_initial = 1e-4;
    double dt_min = 1e-12;
    int max_rejections = 30;       ///< consecutive rejections before giving up
    NormSpec norm;                 ///< ν and a of the reported weighted sup
    bool project = true;           ///< false drops c(τ)Z (exposes the unstable direction)
};

struct ParabolicRecord {
    double tau = 0.0;
    double c = 0.0;                 ///< multiplier that keeps ∫φZ = 0 on the grid
    double c_cc = 0.0;              ///< (∫hZ + ∫_{∂B} ∂_rφ Z) / ∫Z², the continuum relation
    double sup_weighted_phi = 0.0;  ///< τ^ν sup (1+r^a)|φ|
    double pairing = 0.0;           ///< ∫_{B_2R} h Z / ∫_{B_2R} Z²
    double sup_phi = 0.0;
    double z_mass = 0.0;            ///< ∫φZ / ∫Z²
};

struct ParabolicSolution {
    RadialProfile phi;  ///< at tau_end, on the solver nodes plus r = 2R
    RadialProfile Z;    ///< projection direction: grid ground state, scaled to the whole-space Z
    double mu0 = 0.0;   ///< its eigenvalue
    std::vector<ParabolicRecord> trace;
    double sup_weighted_phi = 0.0;
    /// log-slope of d sup|φ|/dτ over the second half of the run: 0 for
    /// linear growth, κ for e^{κτ}
    double growth_rate = 0.0;
    int steps = 0;
    int rejections = 0;

    void write_trace_csv(std::ostream& os) const;
};

/// φ_τ = Δφ + pU^{p-1}φ + h0 - c(τ)Z on B_{2R}, φ = 0 on the boundary and at
/// τ0, Z the ground state. c(τ) is fixed by ∫φZ = 0, whose
/// continuum form is c∫Z² = ∫h0 Z + ∫_{∂B_{2R}} ∂_rφ Z; on the grid it is
/// imposed on each implicit step so the unstable direction never gets
/// excited. Backward Euler on the radial finite-volume operator with step
/// doubling (Richardson-corrected) and local error control.
[[nodiscard]] ParabolicSolution mode0_parabolic(const RadialForcing& h0, double R, double tau0,
                                                double tau_end, const DimensionConfig& cfg,
                                                const ParabolicOptions& opts = {});

}  // namespace blowup

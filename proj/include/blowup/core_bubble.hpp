#pragma once

#include "blowup/dimension.hpp"
#include "blowup/quadrature.hpp"
#include "blowup/radial_profile.hpp"

namespace blowup {

/// A point of the reduced problem: first coordinate and |x̄| (distance to the
/// x1-axis). Every field of the symmetry class depends only on these two.
struct AxiPoint {
    double x1 = 0.0;
    double rho = 0.0;
};

// Aubin-Talenti bubble and its radial derivatives.
[[nodiscard]] double bubble_U(double r, const DimensionConfig& cfg);
[[nodiscard]] double bubble_dU(double r, const DimensionConfig& cfg);
[[nodiscard]] double bubble_d2U(double r, const DimensionConfig& cfg);
/// U^{p-1}, written without fractional powers of U.
[[nodiscard]] double bubble_potential(double r, const DimensionConfig& cfg);

/// Scaling kernel (n-2)/2 U + r U'.
[[nodiscard]] double kernel_Z0(double r, const DimensionConfig& cfg);
[[nodiscard]] double kernel_dZ0(double r, const DimensionConfig& cfg);
[[nodiscard]] double kernel_d2Z0(double r, const DimensionConfig& cfg);
/// Z0(r)/(r-1), finite at the zero r = 1 of Z0.
[[nodiscard]] double kernel_Z0_over_rm1(double r, const DimensionConfig& cfg);

/// Translation kernel dU/dy1 at y = (y1, |ȳ|).
[[nodiscard]] double kernel_Z1(AxiPoint y, const DimensionConfig& cfg);

/// The integrals over R^n that fix pi, ell, A and B.
struct BubbleIntegrals {
    double U_p = 0.0;          ///< int U^p
    double Upm1_Z0 = 0.0;      ///< int U^{p-1} Z0 (negative)
    double Z0_sq = 0.0;        ///< int Z0^2
    double max_error = 0.0;    ///< largest quadrature error estimate among the three
};
[[nodiscard]] BubbleIntegrals bubble_integrals(const DimensionConfig& cfg);

/// pi = (p alpha / 2^{n-2}) [ (A0/A1) Z0 - U^{p-1} ].
class PiProfile {
public:
    PiProfile(const DimensionConfig& cfg, const BubbleIntegrals& ints);
    explicit PiProfile(const DimensionConfig& cfg);

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] double derivative(double r) const;
    [[nodiscard]] double z0_coefficient() const { return z0_coeff_; }
    [[nodiscard]] double potential_coefficient() const { return pot_coeff_; }

private:
    DimensionConfig cfg_;
    double z0_coeff_ = 0.0;
    double pot_coeff_ = 0.0;
};

[[nodiscard]] double pi_profile(double r, const DimensionConfig& cfg, const BubbleIntegrals& ints);

/// Scaling-law constant ell of lambda0 = ell (T-t)^{1+1/(n-4)}.
[[nodiscard]] double constant_ell(const DimensionConfig& cfg, const BubbleIntegrals& ints);
[[nodiscard]] double constant_ell(const DimensionConfig& cfg);

/// Default radial grid: origin plus `nodes` geometric nodes on [1e-3, r_max].
[[nodiscard]] std::vector<double> default_radial_grid(double r_max = 1e3, int nodes = 2048);

class TildeZ;

/// Radial solution h of Δh + pU^{p-1}h = g built by variation of parameters
/// from (Z0, Z̃), regular at the origin. Value, first and second derivatives
/// are available everywhere; beyond the grid the r^{-2} tail is used.
class CorrectionH {
public:
    /// Correction for the forcing g = pi.
    CorrectionH(const DimensionConfig& cfg, double r_max = 1e3, int nodes = 2048);
    /// Same construction for an arbitrary radial forcing g.
    CorrectionH(const DimensionConfig& cfg, const RealFn& forcing, std::vector<double> grid);

    [[nodiscard]] double value(double r) const;
    [[nodiscard]] double d1(double r) const;
    [[nodiscard]] double d2(double r) const;
    /// (n-2)/2 h + r h', the scaling derivative of h.
    [[nodiscard]] double scaling_derivative(double r) const;
    [[nodiscard]] const RadialProfile& profile() const { return h_; }
    [[nodiscard]] double wronskian() const { return wronskian_; }

private:
    void build(const TildeZ& tz, std::vector<double> grid);

    DimensionConfig cfg_;
    RealFn forcing_;
    RadialProfile h_;
    RadialProfile dh_;
    double wronskian_ = 0.0;
};

/// h as a sampled profile on [0, r_max] (origin plus 2048 geometric nodes).
[[nodiscard]] RadialProfile correction_h(const DimensionConfig& cfg, double r_max = 1e3);

}  // namespace blowup

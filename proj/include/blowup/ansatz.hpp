#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "blowup/core_bubble.hpp"
#include "blowup/jet.hpp"

namespace blowup {

/// A parameter correction (d1 or lambda1) as a function of the time to
/// blow-up s = T - t. The correction vanishes at t = T, so
/// `value(s) = -int_t^T rate`; `rate(s)` is d/dt.
struct Correction {
    std::function<double(double)> value;
    std::function<double(double)> rate;

    static Correction zero();
    /// rate = kappa s^e, value = -kappa s^{e+1}/(e+1).
    static Correction power_law(double kappa, double exponent);
    /// Cubic Hermite interpolant of samples on increasing s nodes.
    static Correction sampled(std::vector<double> s, std::vector<double> value,
                              std::vector<double> rate);
};

/// Everything the ansatz needs at one instant.
struct PathState {
    double s = 0.0;                       ///< T - t
    double d0 = 0.0, lam0 = 0.0, lam0dot = 0.0;
    double d1 = 0.0, d1dot = 0.0, lam1 = 0.0, lam1dot = 0.0;
    double ratio0 = 0.0;                  ///< lambda0/d0
    double c0 = 0.0, c0dot = 0.0;         ///< (lambda0/d0)^{n-2} and its time derivative

    [[nodiscard]] double d() const { return d0 + d1; }
    [[nodiscard]] double lam() const { return lam0 + lam1; }
    [[nodiscard]] double ddot() const { return -1.0 + d1dot; }
    [[nodiscard]] double lamdot() const { return lam0dot + lam1dot; }
};

/// T, the leading laws d0 = T - t, lambda0 = ell (T-t)^{1+1/(n-4)} and the
/// corrections. Times are handled through s = T - t so tiny T stays exact.
class ParamPath {
public:
    ParamPath(const DimensionConfig& cfg, double T, double ell, double sigma = 0.9,
              Correction d1 = Correction::zero(), Correction lam1 = Correction::zero());

    [[nodiscard]] PathState at_s(double s) const;
    [[nodiscard]] PathState at(double t) const { return at_s(T_ - t); }
    [[nodiscard]] double T() const { return T_; }
    [[nodiscard]] double ell() const { return ell_; }
    [[nodiscard]] double sigma() const { return sigma_; }
    [[nodiscard]] const DimensionConfig& cfg() const { return cfg_; }

    /// sup over `samples` log-spaced s of (T-t)^{-(1+σ)/(n-4)} (|d1'| + |lambda1'|).
    [[nodiscard]] double correction_norm(int samples = 200) const;
    /// Path CSV: t, d0, lam0, d1, lam1, d1dot, lam1dot.
    void write_csv(std::ostream& os, int samples) const;

private:
    DimensionConfig cfg_;
    double T_, ell_, sigma_;
    Correction d1_, lam1_;
};

/// Domain {m <= x1 <= m_out, |x̄| <= rho_max} and the cutoff scales.
struct GeometryConfig {
    double m = 1.0;
    double m_out = 2.5;
    double rho_max = 1.5;
    double b = 0.25;       ///< W-correction cutoff η(|x-ξ|/(b d0))
    double R = 20.0;       ///< inner cutoff η(|x-ξ|/(R lambda0))
    double Rprime = 40.0;  ///< R' > R

    /// Largest dyadic b keeping the W-cutoff support 2 b d0 inside the domain,
    /// with a factor-2 margin, for every t in [0, T).
    static double default_b(const ParamPath& path);
    /// Throws ConfigError when R' <= R or the cutoff support reaches ∂D.
    void validate(const ParamPath& path) const;
    /// Largest T for which the support invariant holds with d1 = 0.
    [[nodiscard]] double T_max() const;
};

/// C^2 bump: 1 on [0,1], 0 on [2,inf), quintic smoothstep in between.
[[nodiscard]] RadialSample cutoff_eta(double s);

/// Bubble center ξ = (1+d) e1 and its reflection ξ̂ = (1-d) e1.
struct Centers {
    AxiPoint xi;
    AxiPoint xi_hat;
};
[[nodiscard]] Centers centers(const ParamPath& path, double t);

/// Shared ingredients of the ansatz: the bubble constants, π and h.
class Ansatz {
public:
    Ansatz(const DimensionConfig& cfg, double T, GeometryConfig geom = {}, double sigma = 0.9,
           Correction d1 = Correction::zero(), Correction lam1 = Correction::zero());
    Ansatz(ParamPath path, GeometryConfig geom, std::shared_ptr<const CorrectionH> h,
           std::shared_ptr<const PiProfile> pi);

    [[nodiscard]] const ParamPath& path() const { return path_; }
    [[nodiscard]] const GeometryConfig& geometry() const { return geom_; }
    [[nodiscard]] const DimensionConfig& cfg() const { return path_.cfg(); }
    [[nodiscard]] const CorrectionH& h() const { return *h_; }
    [[nodiscard]] const PiProfile& pi() const { return *pi_; }
    [[nodiscard]] std::shared_ptr<const CorrectionH> h_ptr() const { return h_; }
    [[nodiscard]] std::shared_ptr<const PiProfile> pi_ptr() const { return pi_; }

    /// W0, W̄0 and the h-pair w, w̄ as jets.
    [[nodiscard]] Jet W0(AxiPoint x, double t) const;
    [[nodiscard]] Jet W0_bar(AxiPoint x, double t) const;
    [[nodiscard]] Jet w(AxiPoint x, double t) const;
    [[nodiscard]] Jet w_bar(AxiPoint x, double t) const;
    /// η(|x-ξ|/(b d0)).
    [[nodiscard]] Jet eta_b(AxiPoint x, double t) const;
    /// η(|x-ξ|/(R lambda0)) with value, gradient, Laplacian and time derivative.
    [[nodiscard]] Jet eta_R(AxiPoint x, double t) const;
    [[nodiscard]] Jet eta_Rprime(AxiPoint x, double t) const;

    [[nodiscard]] Jet W1(AxiPoint x, double t) const;
    /// (w - w̄) η_b.
    [[nodiscard]] Jet Wcorr(AxiPoint x, double t) const;
    [[nodiscard]] Jet W2(AxiPoint x, double t) const;

    /// τ(t) = int λ0^{-2} dt with zero additive constant (τ -> 0 as s -> ∞).
    [[nodiscard]] double tau(double t) const;
    [[nodiscard]] double tau_of_s(double s) const;

private:
    [[nodiscard]] RadialSample bubble_sample(double r) const;
    [[nodiscard]] RadialSample h_sample(double r) const;
    [[nodiscard]] Jet cutoff(AxiPoint x, double t, double scale, double scale_rate) const;

    ParamPath path_;
    GeometryConfig geom_;
    std::shared_ptr<const CorrectionH> h_;
    std::shared_ptr<const PiProfile> pi_;
};

[[nodiscard]] double eval_W1(AxiPoint x, double t, const Ansatz& a);
[[nodiscard]] double eval_W2(AxiPoint x, double t, const Ansatz& a);
[[nodiscard]] double tau_of_t(const Ansatz& a, double t);
[[nodiscard]] Jet cutoff_etaR(AxiPoint x, double t, const Ansatz& a);

}  // namespace blowup

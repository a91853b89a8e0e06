#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/residual.hpp"

namespace blowup {

/// Relative defect of λ0λ̇0 ∫Z0² - (pα/2^{n-2})(λ0/d0)^{n-2} ∫U^{p-1}Z0 at
/// λ0 = ℓ(T-t)^{1+1/(n-4)}; divided by the larger of the two terms.
[[nodiscard]] double lambda0_ode_residual(double t, double T, const DimensionConfig& cfg,
                                          const BubbleIntegrals& ints);
[[nodiscard]] double lambda0_ode_residual(double t, double T, const DimensionConfig& cfg);

/// A = ∫Z0², B = (p(n-3)α/2^{n-2}) ∫U^{p-1}Z0.
struct ConstantsAB {
    double A = 0.0;
    double B = 0.0;
};
[[nodiscard]] ConstantsAB constants_AB(const DimensionConfig& cfg);

/// Value and gradient of an inner function φ(y) at one time.
struct InnerSample {
    double v = 0.0, dy1 = 0.0, dyrho = 0.0;
};
using InnerFn = std::function<InnerSample(InnerPoint, const PathState&)>;

/// Inputs of the inner forcing. `phi` may be empty (φ = 0); `psi` returns
/// λ0^{(n-2)/2} ψ(λ0 y + ξ, t) and may be empty (ψ = 0).
struct InnerForcing {
    InnerFn phi;
    ScaledField psi;
};

/// H(y, t) = pU^{p-1}λ0^{(n-2)/2}ψ + λ0^{(n+2)/2}E2(λ0 y + ξ, t) + B[φ],
/// B[φ] = λ0λ̇0((n-2)/2 φ + y·∇φ) + (λ0 ḋ + λ0/x1) ∂_{y1}φ.
[[nodiscard]] double assemble_H(InnerPoint y, const PathState& st, const ErrorModel& model,
                                const InnerForcing& forcing = {});

/// Pairings of H with Z0 and Z1 over B(0, 2R).
struct OrthoIntegrals {
    double I0 = 0.0;
    double I1 = 0.0;
    double R = 0.0;
    double t = 0.0;
    double error = 0.0;  ///< |fine - coarse| over the two rules
};

/// Tensor Gauss-Legendre rule on the ball in (|y|, polar angle from e1).
struct BallRule {
    int radial = 128;
    int angular = 64;
};

/// ∫_{B(0,2R)} H Z_i for a generic inner function H(y).
[[nodiscard]] OrthoIntegrals ortho_integrals(const std::function<double(InnerPoint)>& H, double R,
                                             const DimensionConfig& cfg, const BallRule& rule = {});
/// Same with H assembled from the model at time t.
[[nodiscard]] OrthoIntegrals ortho_integrals(const ErrorModel& model, double t,
                                             const InnerForcing& forcing = {},
                                             const BallRule& rule = {});
/// ∫_{B(0,R)} f for an axially symmetric f on R^n.
[[nodiscard]] double ball_integral(const std::function<double(InnerPoint)>& f, double R,
                                   const DimensionConfig& cfg, const BallRule& rule = {});

/// Mode-0 pairing ∫_{B_2R} H Z0 with d1 = λ1 = 0, next to the pairings of its
/// constituents: the scaling term λ0λ̇0 Z0, the far-bubble interaction
/// -pU^{p-1}(y)U(ŷ), the translation term and the removed c0 π η_b.
struct Mode0Cancellation {
    double t = 0.0;
    double pairing = 0.0;
    double scaling = 0.0;
    double interaction = 0.0;
    double translation = 0.0;
    double correction = 0.0;

    [[nodiscard]] double largest_constituent() const;
    /// |pairing| / largest constituent
    [[nodiscard]] double ratio() const { return std::abs(pairing) / largest_constituent(); }
};
[[nodiscard]] Mode0Cancellation mode0_cancellation(const ErrorModel& model, double t,
                                                   const BallRule& rule = {});

/// A_R of the translation law ḋ1 = A_R (T-t)^{2/(n-4)} (the sign of the
/// leading solution 𝐝), read off from ∫H Z1 = 0 with d1 = λ1 = 0 in H:
/// A_R = -I1 / (λ0 s^{2/(n-4)} ∫_{B_2R} Z1²).
struct ARFit {
    std::vector<double> R;
    std::vector<double> A_R;
    std::vector<double> time_spread;  ///< relative spread of A_R over the sampled times
    double A_inf = 0.0;
    double c = 0.0;  ///< A_R ≈ A_inf (1 + c/R)
};
[[nodiscard]] ARFit fit_A_R(const DimensionConfig& cfg, const std::vector<double>& R_list,
                            double T = 1e-8, int times = 5);

/// Forcings of the reduced system, as functions of s = T - t.
struct ReducedForcing {
    double A_R = 1.0;
    std::function<double(double)> p;  ///< empty means 0
    std::function<double(double)> f;  ///< empty means 0
};

/// (𝐝, Λ) of the explicit leading solutions with their time derivatives on
/// an s-grid (increasing, starting at 0).
struct LeadingSolutions {
    std::vector<double> s, d, d_rate, Lambda, Lambda_rate;
};
[[nodiscard]] LeadingSolutions leading_solutions(const ReducedForcing& forcing, double T,
                                                 const DimensionConfig& cfg, int nodes = 400,
                                                 double s_min_ratio = 1e-10);

/// Models of the generic nonlinear couplings: q(λ1/λ0, d1/d0, s). `cross`
/// scales the λ̇1 term of the d-equation and the ḋ1 term of the λ-equation
/// (1 reproduces the full coupling, 0 decouples).
struct QModel {
    std::function<double(double, double, double)> q_d;
    std::function<double(double, double, double)> q_lambda;
    double cross = 0.0;
};

struct ReducedODEState {
    std::vector<double> s, d1, lam1, d1dot, lam1dot;
    std::vector<double> deltas;  ///< sup-norm change per iteration
    int iterations = 0;
    bool converged = false;
    double n1_norm = 0.0;  ///< ‖ḋ1‖ + ‖λ̇1‖ in the (1+σ)/(n-4) weighted norm
    double T = 0.0;

    [[nodiscard]] Correction d1_correction() const;
    [[nodiscard]] Correction lam1_correction() const;
    void write_csv(std::ostream& os) const;
    [[nodiscard]] std::string iteration_log_json() const;
};

struct ReducedOptions {
    int max_iterations = 30;
    double tolerance = 1e-13;
    int nodes = 400;
    double s_min_ratio = 1e-10;
    double sigma = 0.9;
};

/// Picard iteration of the integral equations for (d1, λ1) around (𝐝, Λ).
/// Throws NumericalError when the update grows over three consecutive steps.
[[nodiscard]] ReducedODEState solve_reduced_system(const ReducedForcing& forcing, const QModel& q,
                                                   double T, const DimensionConfig& cfg,
                                                   const ReducedOptions& opts = {});

}  // namespace blowup

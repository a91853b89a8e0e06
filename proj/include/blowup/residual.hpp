#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/ansatz.hpp"

namespace blowup {

/// Exponent bundle shared by the weighted norms.
struct NormSpec {
    double alpha = 0.1;  ///< spatial decay excess of the ** norm, in (0, 1/2)
    double sigma = 0.9;  ///< as in ParamPath
    double a = 0.3;      ///< decay of the outer norms, in (alpha, 1)

    [[nodiscard]] double nu(int n) const { return (n - 2.0 + sigma) / (n - 2.0); }
    [[nodiscard]] double beta(int n) const {
        return 0.5 * (n - 2.0) - (n - 2.0 + 2.0 * sigma) / (2.0 * (n - 4.0));
    }
    /// Throws ConfigError unless 0 < alpha < 1/2, alpha < a < 1, 1/2 < sigma < 1,
    /// beta > 0 and beta - alpha/(n-4) > 0.
    void validate(int n) const;
};

/// Coordinates y = (x - ξ)/λ around the bubble center, as (y1, |ȳ|).
using InnerPoint = AxiPoint;

/// Pointwise error S[u] = -u_t + Δu + u_{x1}/x1 + u^p from a jet.
[[nodiscard]] double apply_S(const Jet& u, double x1, const DimensionConfig& cfg);
/// S[u] for an analytic field evaluator. Throws ConfigError for x1 <= 0.
[[nodiscard]] double apply_S(const FieldFn& u, AxiPoint x, double t, const DimensionConfig& cfg);
/// S[u] by centered differences of a value-only field, steps hx (space) and ht (time).
[[nodiscard]] double apply_S_fd(const std::function<double(AxiPoint, double)>& u, AxiPoint x,
                                double t, const DimensionConfig& cfg, double hx = 1e-4,
                                double ht = 1e-6);

/// u^p with u allowed to be negative only when p is an integer.
[[nodiscard]] double power_p(double u, const DimensionConfig& cfg);
/// (1 - s)^p - 1 + p s, series near s = 0.
[[nodiscard]] double taylor_gap(double s, double p);

/// The constituents of S[W2], each multiplied by λ^{(n+2)/2}. Evaluated in
/// inner coordinates so no power of λ is ever formed.
struct ScaledErrors {
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
    double corr = 0.0;  ///< c0 π(y) η_b, removed by the h-correction
    double e5 = 0.0;
    double e6 = 0.0;

    [[nodiscard]] double S_W1() const { return e1 + e2 + e3 + e4; }
    [[nodiscard]] double S_W2() const { return S_W1() - corr + e5 + e6; }
};

struct ErrorsW1 {
    double e1, e2, e3, e4;
};
struct ErrorsW2 {
    double e5, e6;
};
/// Structured expansion of λ^{(n+2)/2} S[W2] in the inner region.
struct InnerExpansion {
    double E2_lambda = 0.0;
    double E2_d = 0.0;
    double E_remainder = 0.0;
};

/// Evaluator of the ansatz error and of the inner/outer splitting.
class ErrorModel {
public:
    explicit ErrorModel(Ansatz ansatz, double delta = 0.1);

    [[nodiscard]] const Ansatz& ansatz() const { return ansatz_; }
    [[nodiscard]] double delta() const { return delta_; }

    [[nodiscard]] InnerPoint to_inner(AxiPoint x, const PathState& st) const;
    [[nodiscard]] AxiPoint to_outer(InnerPoint y, const PathState& st) const;
    /// Whether x = ξ + λy lies in the closed reduced domain.
    [[nodiscard]] bool in_domain(InnerPoint y, const PathState& st) const;

    [[nodiscard]] ScaledErrors scaled(InnerPoint y, const PathState& st) const;
    /// λ^{(n+2)/2} E2 where E2 = e1 + e2 - corr, with the leading cancellation
    /// between λ0λ̇0 Z0 and the far-bubble potential term done exactly.
    [[nodiscard]] double E2_scaled(InnerPoint y, const PathState& st) const;
    /// λ^{(n+2)/2} Ē2 = λ^{(n+2)/2} (S[W2] - E2 η_R).
    [[nodiscard]] double E2bar_scaled(InnerPoint y, const PathState& st) const;
    /// λ^2 V, the potential of the outer problem.
    [[nodiscard]] double V_scaled(InnerPoint y, const PathState& st) const;
    /// λ^{(n-2)/2} W2.
    [[nodiscard]] double W2_scaled(InnerPoint y, const PathState& st) const;

    /// Physical-variable forms.
    [[nodiscard]] ErrorsW1 error_terms_W1(AxiPoint x, double t) const;
    [[nodiscard]] ErrorsW2 error_terms_W2(AxiPoint x, double t) const;
    /// c0 [Δw + p W0^{p-1} w] η_b, the term the h-correction removes.
    [[nodiscard]] double correction_term(AxiPoint x, double t) const;
    [[nodiscard]] double potential_V(AxiPoint x, double t) const;
    /// Throws ConfigError when |x - ξ| >= δ d.
    [[nodiscard]] InnerExpansion inner_expansion_E2(InnerPoint y, double t) const;

private:
    [[nodiscard]] double lam_power(const PathState& st, double e) const;

    Ansatz ansatz_;
    double delta_;
};

/// (W2 + w)^p - W2^p - p W2^{p-1} w.
[[nodiscard]] double nonlinear_N(double W2val, double wval, const DimensionConfig& cfg);

/// Sampling lattice of the sup norms: radial nodes on [0, y_max_factor R]
/// (origin plus geometric nodes from r_first), a few polar angles and
/// log-spaced times to blow-up s in [s_min_ratio T, T].
struct Lattice {
    int radial_nodes = 64;
    double r_first = 1e-2;
    double y_max_factor = 4.0;
    std::vector<double> angles{0.0, 0.7853981633974483, 1.5707963267948966, 2.356194490192345,
                               3.141592653589793};
    int times = 32;
    double s_min_ratio = 1e-3;
    int boundary_nodes = 64;

    [[nodiscard]] std::vector<double> radii(double R) const;
    [[nodiscard]] std::vector<double> times_to_blowup(double T) const;
    [[nodiscard]] std::string to_json() const;
};

/// A field already multiplied by the λ-power the norm prescribes.
using ScaledField = std::function<double(InnerPoint, const PathState&)>;

/// Sup-norm value with the position of the maximiser.
struct NormValue {
    double value = 0.0;
    double y_at = 0.0;
    double s_at = 0.0;
};

/// ‖f‖_{**,α}; `f` returns λ^{(n+2)/2} f.
[[nodiscard]] NormValue norm_starstar(const ScaledField& f, const ErrorModel& m,
                                      const NormSpec& spec, const Lattice& lat = {});
/// ‖f‖_a; `f` returns λ^{(n-2)/2} f.
[[nodiscard]] NormValue norm_a(const ScaledField& f, const ErrorModel& m, const NormSpec& spec,
                               const Lattice& lat = {});
/// ‖f‖_{*,a}; `f` returns λ^{(n-2)/2} f.
[[nodiscard]] NormValue norm_star_a(const ScaledField& f, const ErrorModel& m,
                                    const NormSpec& spec, const Lattice& lat = {});
/// ‖h‖_{ν,2+a} over |y| < 2R; `f` returns λ^2 h.
[[nodiscard]] NormValue norm_nu2a(const ScaledField& f, const ErrorModel& m, const NormSpec& spec,
                                  const Lattice& lat = {});
/// ‖g‖_{∂D}; `g` returns λ^{(n-2)/2} g at boundary points given in inner coordinates.
[[nodiscard]] NormValue norm_boundary(const ScaledField& g, const ErrorModel& m,
                                      const NormSpec& spec, const Lattice& lat = {});
/// ‖h‖_δ = sup (T-t)^{-δ} |h(t)| over log-spaced times; `h` takes s = T - t.
[[nodiscard]] double norm_delta(const std::function<double(double)>& h, double T, double delta,
                                int samples = 200, double s_min_ratio = 1e-8);

/// One row of the residual-norm scan over (T, R).
struct ScanRow {
    double T, R, norm, bound, ratio;
};
struct ScanResult {
    std::vector<ScanRow> rows;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    double R_power = 0.0;   ///< log-log slope of the norm in R at the smallest T
    Lattice lattice;
};
/// Parameter path used by the scan: λ̇1 = kappa s^{(1+σ)/(n-4)}, d1 = 0.
struct ScanPath {
    double lam1_kappa = 1.0;
    double d1_kappa = 0.0;
};
[[nodiscard]] ScanResult residual_norm_scan(const DimensionConfig& cfg, const std::vector<double>& T_list,
                                     const std::vector<double>& R_list, const NormSpec& spec,
                                     const ScanPath& path = {}, const Lattice& lat = {});
void write_scan_csv(std::ostream& os, const ScanResult& scan);

}  // namespace blowup

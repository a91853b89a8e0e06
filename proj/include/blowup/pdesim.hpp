#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blowup/ansatz.hpp"

namespace blowup {

/// Rectangle {x1_min <= x1 <= x1_max, |x̄| <= rho_max} in the (x1, ρ) half plane.
struct Domain {
    double x1_min = 1.0;
    double x1_max = 2.5;
    double rho_max = 1.5;

    void validate() const;
    /// The rectangle of the ansatz geometry.
    static Domain from(const GeometryConfig& geom);
};

/// One graded axis: x(ξ) = a + w sinh(β(ξ - ξ0)) on ξ ∈ [0, 1], which puts
/// the smallest spacing at the focus a. β = 0 gives a uniform axis.
struct AxisSpec {
    int cells = 128;
    double focus = 0.0;
    double beta = 0.0;

    /// β chosen so that the spacing at the focus is about h_min.
    static AxisSpec with_min_spacing(double lo, double hi, int cells, double focus, double h_min);
    [[nodiscard]] std::vector<double> nodes(double lo, double hi) const;
};

/// Tensor grid; x1 and rho include the boundary nodes.
struct PdeGrid {
    std::vector<double> x1;
    std::vector<double> rho;

    static PdeGrid build(const Domain& dom, const AxisSpec& ax1, const AxisSpec& axrho);
    [[nodiscard]] std::size_t nx() const { return x1.size(); }
    [[nodiscard]] std::size_t nr() const { return rho.size(); }
    [[nodiscard]] double min_spacing() const;
    [[nodiscard]] std::string to_json() const;
};

/// Values on a PdeGrid, row-major in x1 (index i * nr + j). Dirichlet zero on
/// x1 = x1_min, x1 = x1_max and ρ = rho_max; even in ρ at the axis.
struct AxiField {
    PdeGrid grid;
    std::vector<double> u;
    double t = 0.0;

    AxiField() = default;
    AxiField(PdeGrid g, double t0);
    /// Samples f on the nodes and zeroes the Dirichlet walls.
    static AxiField sample(PdeGrid g, double t0, const std::function<double(AxiPoint)>& f);

    [[nodiscard]] double& at(std::size_t i, std::size_t j) { return u[i * grid.nr() + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return u[i * grid.nr() + j]; }

    struct Peak {
        double value = 0.0;
        std::size_t i = 0, j = 0;
        double x1 = 0.0, rho = 0.0;  ///< parabolic refinement of the node position
    };
    [[nodiscard]] Peak peak() const;
    /// Largest |u| on the Dirichlet walls.
    [[nodiscard]] double boundary_max() const;

    /// Flat little-endian doubles (x1-major) plus a JSON header file.
    void write_snapshot(const std::string& path_prefix) const;
    /// CSV of the axis slice ρ = 0: x1,u.
    void write_axis_csv(std::ostream& os) const;
};

/// Terms of u_t = Δu + u_{x1}/x1 + u^p + f that a stepper includes.
struct Physics {
    bool diffusion = true;
    bool reaction = true;
    /// Optional source f(x, t), used by manufactured solutions.
    std::function<double(AxiPoint, double)> source;
};

/// Semi-discrete right-hand side at an interior (or axis) node:
/// u_11 + u_1/x1 + u_ρρ + (n-2)/ρ u_ρ + u^p, with (n-1)u_ρρ on the axis.
[[nodiscard]] double reduced_rhs(const AxiField& f, std::size_t i, std::size_t j,
                                 const DimensionConfig& cfg, const Physics& phys = {});

/// Time-step policy: dt = min(dt_max, cfl · sup_u^{1-p}).
struct StepPolicy {
    double cfl = 0.05;
    double dt_max = 1e-3;
    double dt_min = 1e-300;
};

/// Strang splitting: exact reaction flow u ↦ u(1 - (p-1)τu^{p-1})^{-1/(p-1)}
/// for half steps around a Peaceman-Rachford ADI step of the linear part.
class Stepper {
public:
    Stepper(AxiField field, const DimensionConfig& cfg, Physics phys = {});

    [[nodiscard]] const AxiField& field() const { return field_; }
    /// Advance by dt. Throws NumericalError when the reaction flow blows up
    /// within the step or negatives exceed `negative_tolerance`·sup.
    void step(double dt);
    /// dt from the policy for the current state.
    [[nodiscard]] double next_dt(const StepPolicy& policy) const;
    /// Largest clipped negative value relative to sup u over all steps.
    [[nodiscard]] double clipped_negative() const { return clipped_; }
    double negative_tolerance = 1e-12;

private:
    void react(double dt);
    void diffuse(double dt);

    AxiField field_;
    DimensionConfig cfg_;
    Physics phys_;
    double clipped_ = 0.0;
    // per-axis operator rows: coefficients of u_{k-1}, u_k, u_{k+1}
    std::vector<double> ax_lo_, ax_mid_, ax_hi_, ar_lo_, ar_mid_, ar_hi_;
};

struct RunRecord {
    double t = 0.0;
    double sup_u = 0.0;
    double x1_star = 0.0, rho_star = 0.0;
    double lam_num = 0.0;  ///< (U(0)/sup_u)^{2/(n-2)}
    double dt = 0.0;
    double lam0 = 0.0;     ///< λ0(t) of the seeding path
    double d_num = 0.0;    ///< x1* - 1
};

struct RunTrace {
    std::vector<RunRecord> records;
    std::string reason;          ///< "stop_time", "sup_threshold", "quench", "dt_underflow", "max_steps"
    double clipped_negative = 0.0;
    double boundary_max = 0.0;   ///< largest wall value relative to sup u over the records
    int steps = 0;

    void write_csv(std::ostream& os) const;
    static RunTrace read_csv(std::istream& is);
};

struct RunOptions {
    double stop_fraction = 0.25;  ///< stop at t = stop_fraction · T
    double sup_factor = 64.0;     ///< stop when sup u exceeds this multiple of its initial value
    double quench_factor = 10.0;  ///< flag a quench when sup u falls by this factor
    int record_every = 10;
    long max_steps = 5'000'000;
    StepPolicy policy;
    int cells_x1 = 256;
    int cells_rho = 192;
    double resolution = 8.0;      ///< nodes per λ0(0) at the focus
};

/// Seeds u(·, 0) = max(W2(·, 0), 0) on a grid focused at ξ(0) and runs to
/// the first stop condition. A quench is a termination reason, not an
/// exception, so the trace up to it stays usable.
[[nodiscard]] RunTrace run_from_ansatz(const Ansatz& ansatz, const Domain& dom,
                                       const RunOptions& opts = {});

/// The trace together with the field at the last step, for snapshots.
struct RunOutcome {
    RunTrace trace;
    AxiField final_state;
};
[[nodiscard]] RunOutcome simulate_from_ansatz(const Ansatz& ansatz, const Domain& dom,
                                              const RunOptions& opts = {});
/// Manifest of a run: dimension, T, grid, domain, dt policy, seed.
[[nodiscard]] std::string run_manifest_json(const Ansatz& ansatz, const Domain& dom,
                                            const RunOptions& opts);
/// The grid run_from_ansatz uses.
[[nodiscard]] PdeGrid ansatz_grid(const Ansatz& ansatz, const Domain& dom, const RunOptions& opts);

struct FitWindow {
    double t_begin = 0.0;
    double t_end = 1e300;
    std::optional<double> T_star;  ///< fixed blow-up time; searched when empty
};

struct RateFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    double T_star = 0.0;
    double T_star_richardson = 0.0;  ///< zero of the linear extrapolation of sup^{1-p}
    double typeI = 0.0;              ///< 1/(p-1)
    double typeII = 0.0;             ///< (n-2)(n-3)/(2(n-4))
    int records = 0;

    [[nodiscard]] std::string to_json() const;
};

/// Least-squares slope γ of log sup u = -γ log(T* - t) + b over the window.
/// T* is found by golden-section minimisation of the fit residual, bracketed
/// from the Richardson estimate. Throws ConfigError below 20 records and
/// NumericalError when the optimum sits on the bracket edge.
[[nodiscard]] RateFit fit_rate(const RunTrace& trace, const FitWindow& window,
                               const DimensionConfig& cfg);

}  // namespace blowup

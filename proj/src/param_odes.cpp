#include "blowup/param_odes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "blowup/errors.hpp"

namespace blowup {

double lambda0_ode_residual(double t, double T, const DimensionConfig& cfg, const BubbleIntegrals& ints) {
    const double s = T - t;
    const double ell = constant_ell(cfg, ints);
    const double k = cfg.lam0_exponent;
    const double lam0 = ell * std::pow(s, k);
    const double lam0dot = -k * ell * std::pow(s, k - 1.0);
    const double c0 = std::pow(lam0 / s, cfg.n - 2);
    const double scaling = lam0 * lam0dot * ints.Z0_sq;
    const double far = cfg.p * cfg.alpha_n / std::exp2(cfg.n - 2) * c0 * ints.Upm1_Z0;
    return std::abs(scaling - far) / std::max(std::abs(scaling), std::abs(far));
}

double lambda0_ode_residual(double t, double T, const DimensionConfig& cfg) {
    return lambda0_ode_residual(t, T, cfg, bubble_integrals(cfg));
}

ConstantsAB constants_AB(const DimensionConfig& cfg) {
    const auto ints = bubble_integrals(cfg);
    return {ints.Z0_sq, cfg.p * (cfg.n - 3) * cfg.alpha_n / std::exp2(cfg.n - 2) * ints.Upm1_Z0};
}

double assemble_H(InnerPoint y, const PathState& st, const ErrorModel& model, const InnerForcing& forcing) {
    const auto& cfg = model.ansatz().cfg();
    const int n = cfg.n;
    const double ratio = st.lam0 / st.lam();
    double H = std::pow(ratio, 0.5 * (n + 2)) * model.E2_scaled({y.x1 * ratio, y.rho * ratio}, st);
    if (forcing.psi) H += cfg.p * bubble_potential(std::hypot(y.x1, y.rho), cfg) * forcing.psi(y, st);
    if (forcing.phi) {
        const InnerSample ph = forcing.phi(y, st);
        const double x1 = 1.0 + st.d() + st.lam0 * y.x1;
        H += st.lam0 * st.lam0dot * (0.5 * (n - 2) * ph.v + y.x1 * ph.dy1 + y.rho * ph.dyrho) +
             (st.lam0 * st.ddot() + st.lam0 / x1) * ph.dy1;
    }
    return H;
}

// ------------------------------------------------------------ ball rules --

namespace {

struct PairSums {
    double f0 = 0.0, f1 = 0.0;
};

template <class F>
PairSums ball_sum(const F& f, double radius, const DimensionConfig& cfg, int nr, int na) {
    const auto gr = gauss_legendre_rule(nr);
    const auto ga = gauss_legendre_rule(na);
    const double omega = sphere_area(cfg.n - 1);
    PairSums acc;
    for (int i = 0; i < nr; ++i) {
        const double r = 0.5 * radius * (1.0 + gr.nodes[i]);
        const double wr = 0.5 * radius * gr.weights[i] * std::pow(r, cfg.n - 1);
        for (int j = 0; j < na; ++j) {
            const double th = 0.5 * M_PI * (1.0 + ga.nodes[j]);
            const double w = wr * 0.5 * M_PI * ga.weights[j] * omega * std::pow(std::sin(th), cfg.n - 2);
            const auto v = f(InnerPoint{r * std::cos(th), r * std::sin(th)});
            acc.f0 += w * v.f0;
            acc.f1 += w * v.f1;
        }
    }
    return acc;
}

}  // namespace

double ball_integral(const std::function<double(InnerPoint)>& f, double R, const DimensionConfig& cfg,
                     const BallRule& rule) {
    return ball_sum([&](InnerPoint y) { return PairSums{f(y), 0.0}; }, R, cfg, rule.radial, rule.angular).f0;
}

OrthoIntegrals ortho_integrals(const std::function<double(InnerPoint)>& H, double R,
                               const DimensionConfig& cfg, const BallRule& rule) {
    auto pair = [&](InnerPoint y) {
        const double h = H(y);
        if (!std::isfinite(h)) {
            throw NumericalError(fmt::format("ortho_integrals: non-finite H at y = ({:g}, {:g})", y.x1, y.rho));
        }
        return PairSums{h * kernel_Z0(std::hypot(y.x1, y.rho), cfg), h * kernel_Z1(y, cfg)};
    };
    const auto fine = ball_sum(pair, 2.0 * R, cfg, rule.radial, rule.angular);
    const auto coarse = ball_sum(pair, 2.0 * R, cfg, rule.radial / 2, rule.angular / 2);
    OrthoIntegrals out;
    out.I0 = fine.f0;
    out.I1 = fine.f1;
    out.R = R;
    out.error = std::max(std::abs(fine.f0 - coarse.f0), std::abs(fine.f1 - coarse.f1));
    return out;
}

OrthoIntegrals ortho_integrals(const ErrorModel& model, double t, const InnerForcing& forcing,
                               const BallRule& rule) {
    const PathState st = model.ansatz().path().at(t);
    auto out = ortho_integrals([&](InnerPoint y) { return assemble_H(y, st, model, forcing); },
                               model.ansatz().geometry().R, model.ansatz().cfg(), rule);
    out.t = t;
    return out;
}

double Mode0Cancellation::largest_constituent() const {
    return std::max({std::abs(scaling), std::abs(interaction), std::abs(translation), std::abs(correction)});
}

Mode0Cancellation mode0_cancellation(const ErrorModel& model, double t, const BallRule& rule) {
    const auto& cfg = model.ansatz().cfg();
    const PathState st = model.ansatz().path().at(t);
    if (st.d1 != 0.0 || st.lam1 != 0.0) throw ConfigError("mode0_cancellation: needs d1 = lambda1 = 0");
    const double radius = 2.0 * model.ansatz().geometry().R;
    auto paired = [&](auto&& term) {
        return ball_integral([&](InnerPoint y) { return term(y) * kernel_Z0(std::hypot(y.x1, y.rho), cfg); },
                             radius, cfg, rule);
    };
    auto scaling = [&](InnerPoint y) { return st.lam() * st.lamdot() * kernel_Z0(std::hypot(y.x1, y.rho), cfg); };
    Mode0Cancellation out;
    out.t = t;
    out.pairing = paired([&](InnerPoint y) { return model.E2_scaled(y, st); });
    out.scaling = paired(scaling);
    out.interaction = paired([&](InnerPoint y) { return model.scaled(y, st).e2 - scaling(y); });
    out.translation = paired([&](InnerPoint y) { return model.scaled(y, st).e1; });
    out.correction = paired([&](InnerPoint y) { return -model.scaled(y, st).corr; });
    return out;
}

ARFit fit_A_R(const DimensionConfig& cfg, const std::vector<double>& R_list, double T, int times) {
    if (R_list.size() < 2) throw ConfigError("fit_A_R: need at least two radii");
    const auto h = std::make_shared<const CorrectionH>(cfg);
    const auto pi = std::make_shared<const PiProfile>(cfg);
    const double ell = constant_ell(cfg);
    const double e = 2.0 / (cfg.n - 4.0);
    ARFit fit;
    for (double R : R_list) {
        GeometryConfig geom;
        geom.R = R;
        geom.Rprime = 2.0 * R;
        const ErrorModel model(Ansatz(ParamPath(cfg, T, ell), geom, h, pi));
        const double z1sq = ball_integral(
            [&](InnerPoint y) { return std::pow(kernel_Z1(y, cfg), 2); }, 2.0 * R, cfg);
        std::vector<double> values;
        for (int k = 0; k < times; ++k) {
            const double s = T * std::pow(10.0, -double(k));
            const auto st = model.ansatz().path().at_s(s);
            const auto I = ortho_integrals(
                [&](InnerPoint y) { return assemble_H(y, st, model); }, R, cfg);
            values.push_back(-I.I1 / (st.lam0 * std::pow(s, e) * z1sq));
        }
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        fit.R.push_back(R);
        fit.A_R.push_back(values.back());
        fit.time_spread.push_back((*hi - *lo) / std::abs(values.back()));
    }
    // A_R = a + b/R by least squares
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = double(fit.R.size());
    for (std::size_t i = 0; i < fit.R.size(); ++i) {
        const double x = 1.0 / fit.R[i];
        sx += x, sy += fit.A_R[i], sxx += x * x, sxy += x * fit.A_R[i];
    }
    const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double a = (sy - b * sx) / m;
    fit.A_inf = a;
    fit.c = b / a;
    return fit;
}

// --------------------------------------------------------- reduced system --

namespace {

std::vector<double> s_grid(double T, int nodes, double s_min_ratio) {
    std::vector<double> s{0.0};
    for (int i = 0; i < nodes - 1; ++i) s.push_back(T * std::pow(s_min_ratio, 1.0 - double(i) / (nodes - 2)));
    return s;
}

double eval_or_zero(const std::function<double(double)>& f, double s) { return f ? f(s) : 0.0; }

// ∫_0^{s_i} of nodal values, trapezoid
std::vector<double> cumulative_trapezoid(const std::vector<double>& s, const std::vector<double>& v) {
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) out[i] = out[i - 1] + 0.5 * (s[i] - s[i - 1]) * (v[i] + v[i - 1]);
    return out;
}

double weighted_sup(const std::vector<double>& s, const std::vector<double>& v, double e) {
    double sup = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0) sup = std::max(sup, std::abs(v[i]) * std::pow(s[i], -e));
    }
    return sup;
}

}  // namespace

LeadingSolutions leading_solutions(const ReducedForcing& forcing, double T, const DimensionConfig& cfg,
                                   int nodes, double s_min_ratio) {
    if (!(T > 0.0) || nodes < 3) throw ConfigError("leading_solutions: need T > 0 and at least 3 nodes");
    const int n = cfg.n;
    const double e = 2.0 / (n - 4.0);
    LeadingSolutions out;
    out.s = s_grid(T, nodes, s_min_ratio);
    auto drift = [&](double s) { return std::pow(s, e) * (-forcing.A_R + eval_or_zero(forcing.p, s)); };
    auto source = [&](double s) { return std::pow(s, n - 3.0 + e) * eval_or_zero(forcing.f, s); };
    out.d = cumulative_integral(out.s, drift);
    const auto G = cumulative_integral(out.s, source);
    for (std::size_t i = 0; i < out.s.size(); ++i) {
        const double s = out.s[i];
        out.d_rate.push_back(-drift(s));
        if (s == 0.0) {
            out.Lambda.push_back(0.0);
            out.Lambda_rate.push_back(0.0);
        } else {
            out.Lambda.push_back(G[i] * std::pow(s, -(n - 3.0)));
            out.Lambda_rate.push_back((n - 3.0) * G[i] * std::pow(s, -(n - 2.0)) -
                                      std::pow(s, e) * eval_or_zero(forcing.f, s));
        }
    }
    return out;
}

Correction ReducedODEState::d1_correction() const { return Correction::sampled(s, d1, d1dot); }
Correction ReducedODEState::lam1_correction() const { return Correction::sampled(s, lam1, lam1dot); }

void ReducedODEState::write_csv(std::ostream& os) const {
    os << "t,d1,lam1,d1dot,lam1dot\n";
    for (std::size_t k = s.size(); k-- > 0;) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", T - s[k], d1[k], lam1[k], d1dot[k],
                          lam1dot[k]);
    }
}

std::string ReducedODEState::iteration_log_json() const {
    std::string d;
    for (std::size_t i = 0; i < deltas.size(); ++i) d += fmt::format("{}{:.6e}", i ? "," : "", deltas[i]);
    return fmt::format(R"({{"iterations":{},"converged":{},"n1_norm":{:.6e},"deltas":[{}]}})", iterations,
                       converged ? "true" : "false", n1_norm, d);
}

ReducedODEState solve_reduced_system(const ReducedForcing& forcing, const QModel& q, double T,
                                     const DimensionConfig& cfg, const ReducedOptions& opts) {
    const int n = cfg.n;
    const auto lead = leading_solutions(forcing, T, cfg, opts.nodes, opts.s_min_ratio);
    const auto& s = lead.s;
    const std::size_t m = s.size();
    const double ell = constant_ell(cfg);
    const double k = cfg.lam0_exponent;
    const double e_sig = (1.0 + opts.sigma) / (n - 4.0);

    ReducedODEState st;
    st.T = T;
    st.s = s;
    st.d1 = lead.d;
    st.lam1 = lead.Lambda;
    st.d1dot = lead.d_rate;
    st.lam1dot = lead.Lambda_rate;

    int growth = 0;
    double last = INFINITY;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        std::vector<double> Fd(m, 0.0), Fl(m, 0.0), qd(m, 0.0), ql(m, 0.0);
        for (std::size_t i = 1; i < m; ++i) {
            const double lam0 = ell * std::pow(s[i], k);
            const double lr = st.lam1[i] / lam0, dr = st.d1[i] / s[i];
            const double p = eval_or_zero(forcing.p, s[i]);
            qd[i] = q.q_d ? q.q_d(lr, dr, s[i]) : 0.0;
            ql[i] = q.q_lambda ? q.q_lambda(lr, dr, s[i]) : 0.0;
            Fd[i] = std::pow(s[i], e_sig) * qd[i] +
                    q.cross * std::pow(s[i], 1.0 + 1.0 / (n - 4.0)) * st.lam1dot[i] * (1.0 + p + qd[i]);
            Fl[i] = std::pow(s[i], n - 4.0) * st.lam1[i] * ql[i] +
                    q.cross * std::pow(s[i], n - 2.0 + 1.0 / (n - 4.0)) * st.d1dot[i] * (1.0 + p + ql[i]);
        }
        const auto Dd = cumulative_trapezoid(s, Fd);
        const auto Gl = cumulative_trapezoid(s, Fl);
        ReducedODEState next = st;
        for (std::size_t i = 0; i < m; ++i) {
            next.d1[i] = lead.d[i] + Dd[i];
            next.d1dot[i] = lead.d_rate[i] - Fd[i];
            if (s[i] == 0.0) {
                next.lam1[i] = lead.Lambda[i];
                next.lam1dot[i] = lead.Lambda_rate[i];
            } else {
                const double scale = std::pow(s[i], -(n - 3.0));
                next.lam1[i] = lead.Lambda[i] + Gl[i] * scale;
                next.lam1dot[i] = lead.Lambda_rate[i] + (n - 3.0) * Gl[i] * scale / s[i] - Fl[i] * scale;
            }
        }
        std::vector<double> dd(m), dl(m);
        for (std::size_t i = 0; i < m; ++i) {
            dd[i] = next.d1dot[i] - st.d1dot[i];
            dl[i] = next.lam1dot[i] - st.lam1dot[i];
        }
        const double delta = weighted_sup(s, dd, e_sig) + weighted_sup(s, dl, e_sig);
        next.deltas.push_back(delta);
        next.iterations = it;
        st = std::move(next);
        growth = delta > last ? growth + 1 : 0;
        if (growth >= 3) {
            throw NumericalError(fmt::format("solve_reduced_system: update grew for 3 iterations (delta = {:g})", delta));
        }
        last = delta;
        st.n1_norm = weighted_sup(s, st.d1dot, e_sig) + weighted_sup(s, st.lam1dot, e_sig);
        if (delta <= opts.tolerance * (1.0 + st.n1_norm)) {
            st.converged = true;
            break;
        }
    }
    st.n1_norm = weighted_sup(s, st.d1dot, e_sig) + weighted_sup(s, st.lam1dot, e_sig);
    return st;
}

}  // namespace blowup

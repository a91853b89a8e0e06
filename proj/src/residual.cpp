#include "blowup/residual.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "blowup/errors.hpp"

namespace blowup {

void NormSpec::validate(int n) const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("NormSpec: alpha must lie in (0, 1/2)");
    if (!(a > alpha && a < 1.0)) throw ConfigError("NormSpec: a must lie in (alpha, 1)");
    if (!(sigma > 0.5 && sigma < 1.0)) throw ConfigError("NormSpec: sigma must lie in (1/2, 1)");
    if (!(beta(n) > 0.0 && beta(n) - alpha / (n - 4.0) > 0.0)) {
        throw ConfigError("NormSpec: beta - alpha/(n-4) must be positive");
    }
}

// ------------------------------------------------------------ pointwise S --

double power_p(double u, const DimensionConfig& cfg) {
    if (u >= 0.0) return std::pow(u, cfg.p);
    const double rounded = std::round(cfg.p);
    if (rounded != cfg.p) {
        throw NumericalError(fmt::format("negative base {:g} with fractional exponent {:g}", u, cfg.p));
    }
    return std::pow(u, rounded);
}

double taylor_gap(double s, double p) {
    if (std::abs(s) < 1e-3) {
        // p(p-1)/2 s^2 - p(p-1)(p-2)/6 s^3 + p(p-1)(p-2)(p-3)/24 s^4
        const double c2 = 0.5 * p * (p - 1.0);
        const double c3 = -c2 * (p - 2.0) / 3.0;
        const double c4 = -c3 * (p - 3.0) / 4.0;
        return s * s * (c2 + s * (c3 + s * c4));
    }
    return std::pow(1.0 - s, p) - 1.0 + p * s;
}

double apply_S(const Jet& u, double x1, const DimensionConfig& cfg) {
    return -u.dt + u.lap + u.dx1 / x1 + power_p(u.v, cfg);
}

double apply_S(const FieldFn& u, AxiPoint x, double t, const DimensionConfig& cfg) {
    if (!(x.x1 > 0.0)) throw ConfigError("apply_S: x1 must be positive");
    return apply_S(u(x, t), x.x1, cfg);
}

double apply_S_fd(const std::function<double(AxiPoint, double)>& u, AxiPoint x, double t,
                  const DimensionConfig& cfg, double hx, double ht) {
    if (!(x.x1 > 0.0)) throw ConfigError("apply_S_fd: x1 must be positive");
    const double c = u(x, t);
    const double ut = (u(x, t + ht) - u(x, t - ht)) / (2.0 * ht);
    const double xp = u({x.x1 + hx, x.rho}, t), xm = u({x.x1 - hx, x.rho}, t);
    const double u11 = (xp - 2.0 * c + xm) / (hx * hx);
    const double u1 = (xp - xm) / (2.0 * hx);
    double radial;
    if (x.rho > hx) {
        const double rp = u({x.x1, x.rho + hx}, t), rm = u({x.x1, x.rho - hx}, t);
        radial = (rp - 2.0 * c + rm) / (hx * hx) + (cfg.n - 2) * (rp - rm) / (2.0 * hx * x.rho);
    } else {
        // even in ρ: the ρ-part of the Laplacian tends to (n-1) u_ρρ on the axis
        const double rp = u({x.x1, x.rho + hx}, t);
        radial = (cfg.n - 1) * 2.0 * (rp - c) / (hx * hx);
    }
    return -ut + u11 + radial + u1 / x.x1 + power_p(c, cfg);
}

double nonlinear_N(double W2val, double wval, const DimensionConfig& cfg) {
    if (cfg.p == 2.0) return wval * wval;
    const double total = W2val + wval;
    if (total < 0.0 || W2val < 0.0) {
        throw NumericalError(
            fmt::format("nonlinear_N: negative base (W2 = {:g}, W2 + w = {:g})", W2val, total));
    }
    if (W2val > 0.0 && std::abs(wval) < 1e-3 * W2val) {
        return std::pow(W2val, cfg.p) * taylor_gap(-wval / W2val, cfg.p);
    }
    return std::pow(total, cfg.p) - std::pow(W2val, cfg.p) -
           cfg.p * std::pow(W2val, cfg.p - 1.0) * wval;
}

// ------------------------------------------------------------- ErrorModel --

namespace {

struct CutoffJet {
    double v = 0.0, d1 = 0.0, drho = 0.0, lap = 0.0, dt = 0.0;
    [[nodiscard]] bool vanishes() const { return v == 0.0 && d1 == 0.0 && lap == 0.0; }
};

// η(λ|y|/L) and its x-derivatives for a cutoff centered at ξ with scale L(t)
// and center velocity ḋ e1.
CutoffJet cutoff_in_y(InnerPoint y, double lam, double L, double L_rate, double ddot, int n) {
    const double r = std::hypot(y.x1, y.rho);
    const double q = lam * r / L;
    const RadialSample s = cutoff_eta(q);
    CutoffJet c;
    c.v = s.f;
    if (r > 0.0) {
        c.d1 = s.df / L * (y.x1 / r);
        c.drho = s.df / L * (y.rho / r);
        c.lap = (s.d2f + (n - 1) * s.df / q) / (L * L);
        c.dt = s.df * (-q * L_rate / L - ddot * (y.x1 / r) / L);
    } else {
        c.lap = n * s.d2f / (L * L);
    }
    return c;
}

struct HSample {
    double v, d1, drho, scaling;
};

HSample h_at(const CorrectionH& h, InnerPoint y) {
    const double r = std::hypot(y.x1, y.rho);
    const double dh = h.d1(r);
    HSample s{h.value(r), 0.0, 0.0, h.scaling_derivative(r)};
    if (r > 0.0) {
        s.d1 = dh * y.x1 / r;
        s.drho = dh * y.rho / r;
    }
    return s;
}

}  // namespace

ErrorModel::ErrorModel(Ansatz ansatz, double delta) : ansatz_(std::move(ansatz)), delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("ErrorModel: delta must lie in (0, 1)");
}

double ErrorModel::lam_power(const PathState& st, double e) const { return std::pow(st.lam(), e); }

InnerPoint ErrorModel::to_inner(AxiPoint x, const PathState& st) const {
    return {((x.x1 - 1.0) - st.d()) / st.lam(), x.rho / st.lam()};
}

AxiPoint ErrorModel::to_outer(InnerPoint y, const PathState& st) const {
    return {1.0 + st.d() + st.lam() * y.x1, st.lam() * y.rho};
}

bool ErrorModel::in_domain(InnerPoint y, const PathState& st) const {
    const auto& g = ansatz_.geometry();
    const double off = st.d() + st.lam() * y.x1;  // x1 - 1
    return off >= 0.0 && off <= g.m_out - g.m && st.lam() * y.rho <= g.rho_max;
}

ScaledErrors ErrorModel::scaled(InnerPoint y, const PathState& st) const {
    const auto& cfg = ansatz_.cfg();
    const int n = cfg.n;
    const double p = cfg.p;
    const double lam = st.lam(), lamdot = st.lamdot();
    const double d = st.d(), ddot = st.ddot();
    const double D = d / lam;
    const InnerPoint yh{y.x1 + 2.0 * D, y.rho};
    const double r = std::hypot(y.x1, y.rho);
    const double rh = std::hypot(yh.x1, yh.rho);
    const double off = d + lam * y.x1;
    const double x1 = 1.0 + off;

    const double Uy = bubble_U(r, cfg), Uh = bubble_U(rh, cfg);
    const double Vy = bubble_potential(r, cfg), Vh = bubble_potential(rh, cfg);

    ScaledErrors e;
    e.e1 = lam * (st.d1dot - off / x1) * kernel_Z1(y, cfg);
    e.e2 = lam * lamdot * kernel_Z0(r, cfg) - p * Vy * Uh;
    e.e3 = lam * (ddot - 1.0 / x1) * kernel_Z1(yh, cfg) - lam * lamdot * kernel_Z0(rh, cfg);
    const double ratio = Uh / Uy;
    e.e4 = power_p(Uh, cfg) + std::pow(Uy, p) * taylor_gap(ratio, p);

    const auto& geom = ansatz_.geometry();
    const CutoffJet eta = cutoff_in_y(y, lam, geom.b * st.d0, -geom.b, ddot, n);
    if (eta.vanishes()) return e;

    const auto& h = ansatz_.h();
    const auto& pi = ansatz_.pi();
    const HSample hy = h_at(h, y), hh = h_at(h, yh);
    const double dh = hy.v - hh.v;
    const double c0 = st.c0;
    const double lam2 = lam * lam;

    e.corr = c0 * pi(r) * eta.v;

    const double wt = -lam * (lamdot * hy.scaling + ddot * hy.d1);
    const double wbt = -lam * (lamdot * hh.scaling - ddot * hh.d1);
    e.e5 = c0 * ((wt - wbt) * eta.v + lam2 * dh * eta.dt);

    const double e6a = c0 * (pi(rh) + p * (Vy - Vh) * hh.v) * eta.v;
    const double e6b = -c0 * (2.0 * lam * ((hy.d1 - hh.d1) * eta.d1 + (hy.drho - hh.drho) * eta.drho) +
                              lam2 * dh * eta.lap);
    const double e6c = lam2 * st.c0dot * dh * eta.v;
    const double e6d = -(c0 / x1) * (lam * (hy.d1 - hh.d1) * eta.v + lam2 * dh * eta.d1);

    const double A = Uy - Uh;
    const double B = c0 * dh * eta.v;
    double expansion;
    if (A > 0.0 && std::abs(B) < 1e-3 * A) {
        expansion = std::pow(A, p) * taylor_gap(B / A, p);
    } else {
        const double Apm1 = p == 2.0 ? A : std::pow(std::max(A, 0.0), p - 1.0);
        expansion = power_p(A - B, cfg) - power_p(A, cfg) + p * Apm1 * B;
    }
    const double e6e = expansion - p * Vy * B * std::expm1((p - 1.0) * std::log1p(-ratio));

    e.e6 = e6a + e6b + e6c + e6d + e6e;
    return e;
}

double ErrorModel::E2_scaled(InnerPoint y, const PathState& st) const {
    const auto& cfg = ansatz_.cfg();
    const int n = cfg.n;
    const double lam = st.lam();
    const double D = st.d() / lam;
    const double r = std::hypot(y.x1, y.rho);
    const double off = st.d() + lam * y.x1;
    const double x1 = 1.0 + off;
    const auto& geom = ansatz_.geometry();
    const double eta = cutoff_eta(lam * r / (geom.b * st.d0)).f;
    const double kappa = ansatz_.pi().z0_coefficient();
    const double c = ansatz_.pi().potential_coefficient();

    const double e1 = lam * (st.d1dot - off / x1) * kernel_Z1(y, cfg);
    const double z0_part =
        lam * st.lam1dot + st.lam0dot * st.lam1 + st.c0 * kappa * (1.0 - eta);
    const double delta = std::expm1((n - 2.0) * (std::log1p(st.lam1 / st.lam0) - std::log1p(st.d1 / st.d0)));
    const double q = (1.0 + r * r + 4.0 * D * y.x1) / (4.0 * D * D);
    const double E = std::expm1(-0.5 * (n - 2.0) * std::log1p(q));
    return e1 + kernel_Z0(r, cfg) * z0_part -
           c * st.c0 * bubble_potential(r, cfg) * ((1.0 - eta) + delta + E + delta * E);
}

double ErrorModel::E2bar_scaled(InnerPoint y, const PathState& st) const {
    const auto& geom = ansatz_.geometry();
    const double r = std::hypot(y.x1, y.rho);
    const double etaR = cutoff_eta(st.lam() * r / (geom.R * st.lam0)).f;
    const ScaledErrors e = scaled(y, st);
    const double inner = etaR == 1.0 ? 0.0 : (1.0 - etaR) * E2_scaled(y, st);
    return inner + e.e3 + e.e4 + e.e5 + e.e6;
}

double ErrorModel::W2_scaled(InnerPoint y, const PathState& st) const {
    const auto& cfg = ansatz_.cfg();
    const double D = st.d() / st.lam();
    const InnerPoint yh{y.x1 + 2.0 * D, y.rho};
    const double r = std::hypot(y.x1, y.rho), rh = std::hypot(yh.x1, yh.rho);
    const auto& geom = ansatz_.geometry();
    const double eta = cutoff_eta(st.lam() * r / (geom.b * st.d0)).f;
    double corr = 0.0;
    if (eta != 0.0) corr = st.c0 * (ansatz_.h().value(r) - ansatz_.h().value(rh)) * eta;
    return bubble_U(r, cfg) - bubble_U(rh, cfg) - corr;
}

double ErrorModel::V_scaled(InnerPoint y, const PathState& st) const {
    const auto& cfg = ansatz_.cfg();
    const auto& geom = ansatz_.geometry();
    const double p = cfg.p;
    const double r = std::hypot(y.x1, y.rho);
    const double ratio = st.lam() / st.lam0;
    const double etaR = cutoff_eta(ratio * r / geom.R).f;
    const double etaRp = cutoff_eta(ratio * r / geom.Rprime).f;
    const double frozen = ratio * ratio * bubble_potential(ratio * r, cfg);
    const double w2 = W2_scaled(y, st);
    const double w2p = p == 2.0 ? w2 : std::pow(std::max(w2, 0.0), p - 1.0);
    return p * frozen * etaRp * (1.0 - etaR) + p * (w2p - frozen) * etaRp + p * w2p * (1.0 - etaRp);
}

ErrorsW1 ErrorModel::error_terms_W1(AxiPoint x, double t) const {
    const auto st = ansatz_.path().at(t);
    const double scale = lam_power(st, -0.5 * (ansatz_.cfg().n + 2));
    const auto e = scaled(to_inner(x, st), st);
    return {e.e1 * scale, e.e2 * scale, e.e3 * scale, e.e4 * scale};
}

ErrorsW2 ErrorModel::error_terms_W2(AxiPoint x, double t) const {
    const auto st = ansatz_.path().at(t);
    const double scale = lam_power(st, -0.5 * (ansatz_.cfg().n + 2));
    const auto e = scaled(to_inner(x, st), st);
    return {e.e5 * scale, e.e6 * scale};
}

double ErrorModel::correction_term(AxiPoint x, double t) const {
    const auto st = ansatz_.path().at(t);
    const double scale = lam_power(st, -0.5 * (ansatz_.cfg().n + 2));
    return scaled(to_inner(x, st), st).corr * scale;
}

double ErrorModel::potential_V(AxiPoint x, double t) const {
    const auto st = ansatz_.path().at(t);
    return V_scaled(to_inner(x, st), st) / (st.lam() * st.lam());
}

InnerExpansion ErrorModel::inner_expansion_E2(InnerPoint y, double t) const {
    const auto st = ansatz_.path().at(t);
    const double r = std::hypot(y.x1, y.rho);
    if (!(st.lam() * r < delta_ * st.d())) {
        throw ConfigError(fmt::format("inner_expansion_E2: |x - xi| = {:g} outside delta d = {:g}",
                                      st.lam() * r, delta_ * st.d()));
    }
    const auto& cfg = ansatz_.cfg();
    const int n = cfg.n;
    const double lam = st.lam(), d = st.d();
    const double c = ansatz_.pi().potential_coefficient();
    const double Vy = bubble_potential(r, cfg);
    const auto hy = h_at(ansatz_.h(), y);

    InnerExpansion out;
    const double rate = lam * st.lam1dot + st.lam0dot * st.lam1;
    const double delta =
        std::expm1((n - 2.0) * (std::log1p(st.lam1 / st.lam0) - std::log1p(st.d1 / st.d0)));
    out.E2_lambda = rate * (kernel_Z0(r, cfg) - st.c0 * hy.scaling) - c * st.c0 * delta * Vy;
    out.E2_d = lam * (st.d1dot - (d + lam * y.x1) / (1.0 + d + lam * y.x1)) * kernel_Z1(y, cfg) -
               lam * st.d1dot * st.c0 * hy.d1 +
               cfg.p * (n - 2.0) * cfg.alpha_n / std::exp2(n - 1) * std::pow(lam / d, n - 1) * Vy * y.x1;
    out.E_remainder = scaled(y, st).S_W2() - out.E2_lambda - out.E2_d;
    return out;
}

// ------------------------------------------------------------------ norms --

std::vector<double> Lattice::radii(double R) const {
    std::vector<double> r{0.0};
    const double r_max = y_max_factor * R;
    const int m = radial_nodes - 1;
    for (int i = 0; i < m; ++i) r.push_back(r_first * std::pow(r_max / r_first, double(i) / (m - 1)));
    return r;
}

std::vector<double> Lattice::times_to_blowup(double T) const {
    std::vector<double> s;
    for (int i = 0; i < times; ++i) s.push_back(T * std::pow(s_min_ratio, double(i) / (times - 1)));
    return s;
}

std::string Lattice::to_json() const {
    std::string ang;
    for (std::size_t i = 0; i < angles.size(); ++i) ang += fmt::format("{}{:.6g}", i ? "," : "", angles[i]);
    return fmt::format(
        R"({{"radial_nodes":{},"r_first":{:g},"y_max_factor":{:g},"angles":[{}],"times":{},"s_min_ratio":{:g},"boundary_nodes":{}}})",
        radial_nodes, r_first, y_max_factor, ang, times, s_min_ratio, boundary_nodes);
}

namespace {

template <class Weight>
NormValue inner_sup(const ScaledField& f, const ErrorModel& m, const Lattice& lat, double r_limit,
                    const Weight& weight) {
    const auto& path = m.ansatz().path();
    const double R = m.ansatz().geometry().R;
    NormValue best;
    for (double s : lat.times_to_blowup(path.T())) {
        const PathState st = path.at_s(s);
        for (double r : lat.radii(R)) {
            if (r >= r_limit) continue;
            for (double th : lat.angles) {
                const InnerPoint y{r * std::cos(th), r * std::sin(th)};
                if (!m.in_domain(y, st)) continue;
                const double v = f(y, st);
                if (!std::isfinite(v)) {
                    throw NumericalError(fmt::format("norm: non-finite sample at |y| = {:g}, s = {:g}", r, s));
                }
                const double ratio = std::abs(v) / weight(r, st);
                if (ratio > best.value) best = {ratio, r, s};
                if (r == 0.0) break;
            }
        }
    }
    return best;
}

double decay_scale(const PathState& st, int n, double sigma) { return std::pow(st.ratio0, n - 2.0 + sigma); }

}  // namespace

NormValue norm_starstar(const ScaledField& f, const ErrorModel& m, const NormSpec& spec,
                        const Lattice& lat) {
    const int n = m.ansatz().cfg().n;
    return inner_sup(f, m, lat, INFINITY, [&](double r, const PathState& st) {
        return decay_scale(st, n, spec.sigma) / (1.0 + std::pow(r, 2.0 + spec.alpha));
    });
}

NormValue norm_a(const ScaledField& f, const ErrorModel& m, const NormSpec& spec, const Lattice& lat) {
    const int n = m.ansatz().cfg().n;
    return inner_sup(f, m, lat, INFINITY, [&](double r, const PathState& st) {
        return decay_scale(st, n, spec.sigma) *
               (1.0 / (1.0 + std::pow(r, spec.a)) +
                std::pow(st.lam(), spec.alpha) * std::pow(st.s, -0.5 * spec.alpha));
    });
}

NormValue norm_star_a(const ScaledField& f, const ErrorModel& m, const NormSpec& spec,
                      const Lattice& lat) {
    const int n = m.ansatz().cfg().n;
    return inner_sup(f, m, lat, INFINITY, [&](double r, const PathState& st) {
        return decay_scale(st, n, spec.sigma) *
               (1.0 / (st.lam() * (1.0 + std::pow(r, 1.0 + spec.a))) +
                std::pow(st.lam(), spec.alpha) * std::pow(st.s, -0.5 * spec.alpha));
    });
}

NormValue norm_nu2a(const ScaledField& f, const ErrorModel& m, const NormSpec& spec,
                    const Lattice& lat) {
    const int n = m.ansatz().cfg().n;
    const double nu = spec.nu(n);
    const double R = m.ansatz().geometry().R;
    return inner_sup(f, m, lat, 2.0 * R, [&](double r, const PathState& st) {
        const double tau = m.ansatz().tau_of_s(st.s);
        return 1.0 / (std::pow(tau, nu) * (1.0 + std::pow(r, 2.0 + spec.a)));
    });
}

NormValue norm_boundary(const ScaledField& g, const ErrorModel& m, const NormSpec& spec,
                        const Lattice& lat) {
    const auto& path = m.ansatz().path();
    const auto& geom = m.ansatz().geometry();
    const int n = m.ansatz().cfg().n;
    std::vector<AxiPoint> pts;
    const int k = lat.boundary_nodes;
    for (int i = 0; i < k; ++i) {
        const double u = double(i) / (k - 1);
        pts.push_back({geom.m, u * geom.rho_max});
        pts.push_back({geom.m_out, u * geom.rho_max});
        pts.push_back({geom.m + u * (geom.m_out - geom.m), geom.rho_max});
    }
    NormValue best;
    for (double s : lat.times_to_blowup(path.T())) {
        const PathState st = path.at_s(s);
        const double weight = std::pow(st.ratio0, -(n - 2.0 + spec.sigma)) * std::pow(s, 0.5 * spec.alpha) *
                              std::pow(st.lam(), -spec.alpha);
        for (const auto& x : pts) {
            const double v = g(m.to_inner(x, st), st);
            if (!std::isfinite(v)) throw NumericalError("norm_boundary: non-finite sample");
            const double val = std::abs(v) * weight;
            if (val > best.value) best = {val, std::hypot(x.x1 - 1.0, x.rho), s};
        }
    }
    return best;
}

double norm_delta(const std::function<double(double)>& h, double T, double delta, int samples,
                  double s_min_ratio) {
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = T * std::pow(s_min_ratio, double(i) / (samples - 1));
        const double v = h(s);
        if (!std::isfinite(v)) throw NumericalError("norm_delta: non-finite sample");
        sup = std::max(sup, std::pow(s, -delta) * std::abs(v));
    }
    return sup;
}

// ---------------------------------------------------------------- norm scan --

ScanResult residual_norm_scan(const DimensionConfig& cfg, const std::vector<double>& T_list,
                       const std::vector<double>& R_list, const NormSpec& spec, const ScanPath& sp,
                       const Lattice& lat) {
    spec.validate(cfg.n);
    if (T_list.empty() || R_list.empty()) throw ConfigError("residual_norm_scan: empty T or R list");
    const auto h = std::make_shared<const CorrectionH>(cfg);
    const auto pi = std::make_shared<const PiProfile>(cfg);
    const double ell = constant_ell(cfg);
    const double rate_exp = (1.0 + spec.sigma) / (cfg.n - 4.0);

    ScanResult out;
    out.lattice = lat;
    for (double T : T_list) {
        for (double R : R_list) {
            ParamPath path(cfg, T, ell, spec.sigma, Correction::power_law(sp.d1_kappa, rate_exp),
                           Correction::power_law(sp.lam1_kappa, rate_exp));
            GeometryConfig geom;
            geom.R = R;
            geom.Rprime = 2.0 * R;
            const ErrorModel model(Ansatz(std::move(path), geom, h, pi));
            const auto norm = norm_starstar(
                [&](InnerPoint y, const PathState& st) { return model.E2bar_scaled(y, st); }, model,
                spec, lat);
            const double bound = std::max(std::pow(T, (1.0 - spec.sigma) / (cfg.n - 4.0)), 1.0 / (R * R));
            out.rows.push_back({T, R, norm.value, bound, norm.value / bound});
        }
    }
    std::vector<double> ratios;
    for (const auto& r : out.rows) ratios.push_back(r.ratio);
    std::sort(ratios.begin(), ratios.end());
    out.max_ratio = ratios.back();
    const std::size_t k = ratios.size();
    out.median_ratio = k % 2 ? ratios[k / 2] : 0.5 * (ratios[k / 2 - 1] + ratios[k / 2]);

    // log-log slope in R at the smallest T
    const double T_min = *std::min_element(T_list.begin(), T_list.end());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : out.rows) {
        if (r.T != T_min) continue;
        const double lx = std::log(r.R), ly = std::log(r.norm);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++cnt;
    }
    out.R_power = cnt > 1 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
    return out;
}

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
    os << "# lattice=" << scan.lattice.to_json() << "\n";
    os << "T,R,norm,bound,ratio\n";
    for (const auto& r : scan.rows) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.T, r.R, r.norm, r.bound, r.ratio);
    }
}

}  // namespace blowup

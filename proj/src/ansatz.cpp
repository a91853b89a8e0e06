#include "blowup/ansatz.hpp"

#include <cmath>
#include <ostream>

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <fmt/format.h>

#include "blowup/errors.hpp"

namespace blowup {

// ------------------------------------------------------------ Correction --

Correction Correction::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

Correction Correction::power_law(double kappa, double exponent) {
    return {[=](double s) { return -kappa * std::pow(s, exponent + 1.0) / (exponent + 1.0); },
            [=](double s) { return kappa * std::pow(s, exponent); }};
}

Correction Correction::sampled(std::vector<double> s, std::vector<double> value,
                               std::vector<double> rate) {
    if (s.size() < 2 || s.size() != value.size() || s.size() != rate.size()) {
        throw ConfigError("Correction::sampled: need matching sample arrays of length >= 2");
    }
    const double s_max = s.back();
    // value is a function of s; d/ds value = -d/dt value = -rate
    std::vector<double> dvalue(rate.size());
    for (std::size_t i = 0; i < rate.size(); ++i) dvalue[i] = -rate[i];
    using Spline = boost::math::interpolators::cubic_hermite<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::vector<double>(s), std::move(value), std::move(dvalue));
    const double s_min = s.front();
    auto clamp = [s_min, s_max](double x) { return std::min(std::max(x, s_min), s_max); };
    return {[spline, clamp](double x) { return (*spline)(clamp(x)); },
            [spline, clamp](double x) { return -spline->prime(clamp(x)); }};
}

// -------------------------------------------------------------- ParamPath --

ParamPath::ParamPath(const DimensionConfig& cfg, double T, double ell, double sigma, Correction d1,
                     Correction lam1)
    : cfg_(cfg), T_(T), ell_(ell), sigma_(sigma), d1_(std::move(d1)), lam1_(std::move(lam1)) {
    if (!(T > 0.0)) throw ConfigError("ParamPath: T must be positive");
    if (!(sigma > 0.5 && sigma < 1.0)) throw ConfigError("ParamPath: sigma must lie in (1/2, 1)");
    if (!(ell > 0.0)) throw ConfigError("ParamPath: ell must be positive");
}

PathState ParamPath::at_s(double s) const {
    const int n = cfg_.n;
    const double k = cfg_.lam0_exponent;
    PathState st;
    st.s = s;
    st.d0 = s;
    st.lam0 = ell_ * std::pow(s, k);
    st.lam0dot = -k * ell_ * std::pow(s, k - 1.0);
    st.d1 = d1_.value(s);
    st.d1dot = d1_.rate(s);
    st.lam1 = lam1_.value(s);
    st.lam1dot = lam1_.rate(s);
    st.ratio0 = ell_ * std::pow(s, 1.0 / (n - 4.0));
    st.c0 = std::pow(st.ratio0, n - 2);
    // c0 = ell^{n-2} s^{(n-2)/(n-4)}, d/dt = -d/ds
    st.c0dot = -(n - 2.0) / (n - 4.0) * st.c0 / s;
    return st;
}

double ParamPath::correction_norm(int samples) const {
    const double e = (1.0 + sigma_) / (cfg_.n - 4.0);
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = T_ * std::pow(10.0, -8.0 * i / (samples - 1));
        sup = std::max(sup, (std::abs(d1_.rate(s)) + std::abs(lam1_.rate(s))) * std::pow(s, -e));
    }
    return sup;
}

void ParamPath::write_csv(std::ostream& os, int samples) const {
    os << "t,d0,lam0,d1,lam1,d1dot,lam1dot\n";
    for (int i = 0; i < samples; ++i) {
        const double t = T_ * i / samples;
        const auto st = at(t);
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, st.d0,
                          st.lam0, st.d1, st.lam1, st.d1dot, st.lam1dot);
    }
}

// -------------------------------------------------------- GeometryConfig --

double GeometryConfig::default_b(const ParamPath& path) {
    double inf_ratio = 1.0;  // inf over t of d/d0
    for (int i = 0; i < 400; ++i) {
        const double s = path.T() * std::pow(10.0, -10.0 * i / 399.0);
        const auto st = path.at_s(s);
        inf_ratio = std::min(inf_ratio, st.d() / st.d0);
    }
    const GeometryConfig g;
    const double far = std::min(g.m_out - g.m, g.rho_max) - path.T();
    const double limit = std::min(inf_ratio / 4.0, far / (4.0 * path.T()));
    return std::exp2(std::floor(std::log2(limit)));
}

void GeometryConfig::validate(const ParamPath& path) const {
    if (!(Rprime > R) || !(R > 0.0)) throw ConfigError("geometry: need 0 < R < R'");
    if (!(m_out > m) || !(rho_max > 0.0) || !(b > 0.0)) throw ConfigError("geometry: degenerate domain");
    for (int i = 0; i < 400; ++i) {
        const double s = path.T() * std::pow(10.0, -10.0 * i / 399.0);
        const auto st = path.at_s(s);
        const double support = 2.0 * b * st.d0;
        const double to_wall = std::min({st.d(), m_out - m - st.d(), rho_max});
        if (!(st.d() > 0.0) || !(st.lam() > 0.0)) {
            throw ConfigError(fmt::format("geometry: d or lambda not positive at T-t = {:g}", s));
        }
        if (!(support < to_wall)) {
            throw ConfigError(fmt::format(
                "geometry: cutoff support 2 b d0 = {:g} reaches the boundary (distance {:g})", support,
                to_wall));
        }
    }
}

double GeometryConfig::T_max() const {
    // with d = d0 = T - t: 2 b s < s needs b < 1/2, and 2 b T + T < m_out - m
    if (b >= 0.5) return 0.0;
    return std::min((m_out - m) / (1.0 + 2.0 * b), rho_max / (2.0 * b));
}

// ------------------------------------------------------------------ cutoff --

RadialSample cutoff_eta(double s) {
    if (s <= 1.0) return {1.0, 0.0, 0.0};
    if (s >= 2.0) return {0.0, 0.0, 0.0};
    const double x = s - 1.0;
    const double x2 = x * x;
    const double smooth = x2 * x * (10.0 - 15.0 * x + 6.0 * x2);
    const double d = 30.0 * x2 * (1.0 - x) * (1.0 - x);
    const double d2 = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
    return {1.0 - smooth, -d, -d2};
}

Centers centers(const ParamPath& path, double t) {
    const double d = path.at(t).d();
    return {{1.0 + d, 0.0}, {1.0 - d, 0.0}};
}

// ------------------------------------------------------------------ Ansatz --

Ansatz::Ansatz(const DimensionConfig& cfg, double T, GeometryConfig geom, double sigma,
               Correction d1, Correction lam1)
    : path_(cfg, T, constant_ell(cfg), sigma, std::move(d1), std::move(lam1)),
      geom_(geom),
      h_(std::make_shared<CorrectionH>(cfg)),
      pi_(std::make_shared<PiProfile>(cfg)) {
    geom_.validate(path_);
}

Ansatz::Ansatz(ParamPath path, GeometryConfig geom, std::shared_ptr<const CorrectionH> h,
               std::shared_ptr<const PiProfile> pi)
    : path_(std::move(path)), geom_(geom), h_(std::move(h)), pi_(std::move(pi)) {
    geom_.validate(path_);
}

RadialSample Ansatz::bubble_sample(double r) const {
    const auto& c = cfg();
    return {bubble_U(r, c), bubble_dU(r, c), bubble_d2U(r, c)};
}

RadialSample Ansatz::h_sample(double r) const { return {h_->value(r), h_->d1(r), h_->d2(r)}; }

namespace {

MovingRadial scaled_motion(const PathState& st, int n, double center, double center_rate) {
    const double lam = st.lam();
    const double amp = std::pow(lam, -0.5 * (n - 2));
    return {amp, -0.5 * (n - 2) * amp * st.lamdot() / lam, lam, st.lamdot(), center, center_rate};
}

}  // namespace

Jet Ansatz::W0(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    const int n = cfg().n;
    return scaled_motion(st, n, 1.0 + st.d(), st.ddot())
        .jet(x, n, [this](double r) { return bubble_sample(r); });
}

Jet Ansatz::W0_bar(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    const int n = cfg().n;
    return scaled_motion(st, n, 1.0 - st.d(), -st.ddot())
        .jet(x, n, [this](double r) { return bubble_sample(r); });
}

Jet Ansatz::w(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    const int n = cfg().n;
    return scaled_motion(st, n, 1.0 + st.d(), st.ddot())
        .jet(x, n, [this](double r) { return h_sample(r); });
}

Jet Ansatz::w_bar(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    const int n = cfg().n;
    return scaled_motion(st, n, 1.0 - st.d(), -st.ddot())
        .jet(x, n, [this](double r) { return h_sample(r); });
}

Jet Ansatz::cutoff(AxiPoint x, double t, double scale, double scale_rate) const {
    const auto st = path_.at(t);
    const MovingRadial m{1.0, 0.0, scale, scale_rate, 1.0 + st.d(), st.ddot()};
    return m.jet(x, cfg().n, cutoff_eta);
}

Jet Ansatz::eta_b(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    return cutoff(x, t, geom_.b * st.d0, -geom_.b);
}

Jet Ansatz::eta_R(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    return cutoff(x, t, geom_.R * st.lam0, geom_.R * st.lam0dot);
}

Jet Ansatz::eta_Rprime(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    return cutoff(x, t, geom_.Rprime * st.lam0, geom_.Rprime * st.lam0dot);
}

Jet Ansatz::W1(AxiPoint x, double t) const { return W0(x, t) - W0_bar(x, t); }

Jet Ansatz::Wcorr(AxiPoint x, double t) const {
    const Jet eta = eta_b(x, t);
    if (eta.v == 0.0 && eta.dx1 == 0.0 && eta.lap == 0.0) return {};
    return (w(x, t) - w_bar(x, t)) * eta;
}

Jet Ansatz::W2(AxiPoint x, double t) const {
    const auto st = path_.at(t);
    return W1(x, t) - Wcorr(x, t).scaled(st.c0, st.c0dot);
}

double Ansatz::tau_of_s(double s) const {
    const double n = cfg().n;
    const double ell = path_.ell();
    return (n - 4.0) / ((n - 2.0) * ell * ell) * std::pow(s, -1.0 - 2.0 / (n - 4.0));
}

double Ansatz::tau(double t) const { return tau_of_s(path_.T() - t); }

double eval_W1(AxiPoint x, double t, const Ansatz& a) { return a.W1(x, t).v; }
double eval_W2(AxiPoint x, double t, const Ansatz& a) { return a.W2(x, t).v; }
double tau_of_t(const Ansatz& a, double t) { return a.tau(t); }
Jet cutoff_etaR(AxiPoint x, double t, const Ansatz& a) { return a.eta_R(x, t); }

}  // namespace blowup

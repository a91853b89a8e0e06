#include <cmath>
#include <functional>

#include "blowup/ansatz.hpp"
#include "blowup/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blowup;

namespace {

using Field = std::function<Jet(AxiPoint, double)>;

/// Compares a jet with five-point differences of its value at spatial step h
/// and time step k.
void check_jet(const Field& f, AxiPoint x, double t, double h, double k, double tol) {
    auto v = [&](AxiPoint y, double s) { return f(y, s).v; };
    const Jet j = f(x, t);
    const double dx1 = oracle::d1([&](double a) { return v({a, x.rho}, t); }, x.x1, h);
    const double drho = oracle::d1([&](double a) { return v({x.x1, a}, t); }, x.rho, h);
    const double d11 = oracle::d2([&](double a) { return v({a, x.rho}, t); }, x.x1, h);
    const double drr = oracle::d2([&](double a) { return v({x.x1, a}, t); }, x.rho, h);
    const double dt = oracle::d1([&](double s) { return v(x, s); }, t, k);
    const int n = 6;
    const double lap = d11 + drr + (n - 2.0) / x.rho * drho;
    const double gscale = std::abs(j.dx1) + std::abs(j.drho) + std::abs(j.v) / h * 1e-3;
    CHECK(std::abs(j.dx1 - dx1) <= tol * gscale);
    CHECK(std::abs(j.drho - drho) <= tol * gscale);
    CHECK(std::abs(j.lap - lap) <= tol * (std::abs(d11) + std::abs(drr) + std::abs(j.lap)));
    CHECK(j.dt == doctest::Approx(dt).epsilon(tol));
}

}  // namespace

TEST_CASE("cutoff eta is C2 with the right plateaus") {
    CHECK(cutoff_eta(0.3).f == 1.0);
    CHECK(cutoff_eta(1.0).f == 1.0);
    CHECK(cutoff_eta(2.0).f == 0.0);
    CHECK(cutoff_eta(2.5).f == 0.0);
    for (double s : {1.0, 2.0}) {
        CHECK(std::abs(cutoff_eta(s).df) < 1e-14);
        CHECK(std::abs(cutoff_eta(s).d2f) < 1e-12);
    }
    for (double s = 1.0; s < 2.0; s += 0.05) {
        CHECK(cutoff_eta(s).df <= 0.0);
        CHECK(cutoff_eta(s).f >= 0.0);
        CHECK(cutoff_eta(s).f <= 1.0);
    }
    auto f = [](double s) { return cutoff_eta(s).f; };
    auto df = [](double s) { return cutoff_eta(s).df; };
    for (double s : {1.2, 1.5, 1.8}) {
        CHECK(cutoff_eta(s).df == doctest::Approx(oracle::d1(f, s, 1e-4)).epsilon(1e-8));
        CHECK(cutoff_eta(s).d2f == doctest::Approx(oracle::d1(df, s, 1e-4)).epsilon(1e-8));
    }
}

TEST_CASE("leading parameter laws") {
    const auto cfg = DimensionConfig::make(6);
    const double ell = constant_ell(cfg);
    const ParamPath path(cfg, 1e-2, ell);
    for (double t : {0.0, 5e-3, 9.99e-3}) {
        const PathState st = path.at(t);
        const double s = 1e-2 - t;
        CHECK(st.d0 == doctest::Approx(s).epsilon(1e-12));
        CHECK(st.lam0 == doctest::Approx(ell * std::pow(s, 1.5)).epsilon(1e-12));
        CHECK(st.lam0dot == doctest::Approx(-1.5 * ell * std::sqrt(s)).epsilon(1e-12));
        CHECK(st.c0 == doctest::Approx(std::pow(st.lam0 / st.d0, 4)).epsilon(1e-12));
        CHECK(st.d1 == 0.0);
        CHECK(st.lam1 == 0.0);
    }
    CHECK(path.correction_norm() == 0.0);
}

TEST_CASE("power-law corrections integrate their rates") {
    const Correction c = Correction::power_law(2.0, 0.5);
    auto v = [&](double s) { return c.value(s); };
    for (double s : {1e-3, 0.1, 0.7}) {
        // rate = d/dt = -d/ds
        CHECK(c.rate(s) == doctest::Approx(-oracle::d1(v, s, 1e-4 * s)).epsilon(1e-8));
    }
    CHECK(c.value(0.0) == 0.0);
}

TEST_CASE("centers sit at distance d on either side of the boundary circle") {
    const auto cfg = DimensionConfig::make(6);
    const ParamPath path(cfg, 1e-2, constant_ell(cfg));
    const Centers c = centers(path, 4e-3);
    CHECK(c.xi.x1 == doctest::Approx(1.006).epsilon(1e-14));
    CHECK(c.xi_hat.x1 == doctest::Approx(0.994).epsilon(1e-14));
    CHECK(c.xi.rho == 0.0);
}

TEST_CASE("W1 vanishes on the boundary circle x1 = 1") {
    const auto cfg = DimensionConfig::make(6);
    const Ansatz a(cfg, 1e-2);
    for (double t : {0.0, 5e-3, 9e-3})
        for (double rho : {0.0, 1e-4, 0.01, 0.3, 1.2}) {
            // the limit is the rounding of the center 1 + d, amplified by d/λ
            const double scale = std::abs(a.W0({1.0, rho}, t).v);
            CHECK(std::abs(eval_W1({1.0, rho}, t, a)) <= 1e-11 * scale);
        }
}

TEST_CASE("ansatz jets agree with finite differences") {
    const auto cfg = DimensionConfig::make(6);
    const Ansatz a(cfg, 1e-2);
    const double t = 5e-3;
    const PathState st = a.path().at(t);
    const double lam = st.lam();
    const double xi = 1.0 + st.d();
    const double k = 1e-4 * st.s;
    for (AxiPoint x : {AxiPoint{xi + 0.7 * lam, 1.3 * lam}, AxiPoint{xi - 3.0 * lam, 2.0 * lam},
                       AxiPoint{xi + 30.0 * lam, 15.0 * lam}}) {
        const double h = 1e-3 * std::hypot(x.x1 - xi, x.rho);
        check_jet([&](AxiPoint y, double s) { return a.W0(y, s); }, x, t, h, k, 1e-6);
        check_jet([&](AxiPoint y, double s) { return a.W2(y, s); }, x, t, h, k, 1e-6);
        check_jet([&](AxiPoint y, double s) { return a.eta_R(y, s); }, x, t, h, k, 1e-6);
    }
    // transition region of the b-cutoff
    const AxiPoint x{xi + 1.5 * a.geometry().b * st.d0, 0.2 * st.d0};
    const double h = 1e-4 * st.d0;
    check_jet([&](AxiPoint y, double s) { return a.Wcorr(y, s); }, x, t, h, k, 1e-5);
    check_jet([&](AxiPoint y, double s) { return a.eta_b(y, s); }, x, t, h, k, 1e-5);
}

TEST_CASE("tau has derivative lambda0^-2 and tends to 0 as s grows") {
    const auto cfg = DimensionConfig::make(6);
    const Ansatz a(cfg, 1e-2);
    auto tau = [&](double t) { return tau_of_t(a, t); };
    for (double t : {1e-3, 5e-3, 9e-3}) {
        const double lam0 = a.path().at(t).lam0;
        const double dtau = oracle::d1(tau, t, 1e-4 * (1e-2 - t));
        CHECK(dtau * lam0 * lam0 == doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK(a.tau_of_s(1e6) < a.tau_of_s(1.0));
    CHECK(std::abs(a.tau_of_s(1e12)) < 1e-4 * std::abs(a.tau_of_s(1e-2)));
}

TEST_CASE("cutoff_etaR equals one on B_R and zero beyond 2R") {
    const auto cfg = DimensionConfig::make(6);
    const Ansatz a(cfg, 1e-2);
    const double t = 2e-3;
    const PathState st = a.path().at(t);
    const double R = a.geometry().R, xi = 1.0 + st.d();
    CHECK(cutoff_etaR({xi + 0.99 * R * st.lam(), 0.0}, t, a).v == 1.0);
    CHECK(cutoff_etaR({xi, 2.01 * R * st.lam()}, t, a).v == 0.0);
    const double mid = cutoff_etaR({xi, 1.5 * R * st.lam()}, t, a).v;
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
}

TEST_CASE("invalid configurations are rejected") {
    const auto cfg = DimensionConfig::make(6);
    const double ell = constant_ell(cfg);
    CHECK_THROWS_AS(ParamPath(cfg, -1.0, ell), ConfigError);
    CHECK_THROWS_AS(ParamPath(cfg, 1e-2, ell, 0.4), ConfigError);
    CHECK_THROWS_AS(ParamPath(cfg, 1e-2, ell, 1.0), ConfigError);
    const ParamPath path(cfg, 1e-2, ell);
    GeometryConfig g;
    g.Rprime = g.R;
    CHECK_THROWS_AS(g.validate(path), ConfigError);
    GeometryConfig wide;
    wide.b = 0.6;
    CHECK_THROWS_AS(wide.validate(path), ConfigError);
    CHECK(wide.T_max() == 0.0);
    const GeometryConfig ok;
    CHECK_NOTHROW(ok.validate(path));
    // d1 that drives d through zero
    const ParamPath bad(cfg, 1e-2, ell, 0.9, Correction::power_law(5.0, 0.0));
    CHECK_THROWS_AS(ok.validate(bad), ConfigError);
    CHECK(GeometryConfig::default_b(path) <= 0.25);
}

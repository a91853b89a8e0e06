#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/residual.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

Ansatz make_ansatz() { return Ansatz(DimensionConfig::make(6), 1e-2); }

}  // namespace

TEST_CASE("S from a jet matches centered differences on a polynomial field") {
    const auto cfg = DimensionConfig::make(7);
    auto value = [](AxiPoint x, double t) { return std::exp(-t) * x.x1 * x.x1 + x.rho * x.rho * x.rho; };
    auto jet = [&](AxiPoint x, double t) {
        const double e = std::exp(-t);
        Jet j;
        j.v = value(x, t);
        j.dx1 = 2.0 * e * x.x1;
        j.drho = 3.0 * x.rho * x.rho;
        j.lap = 2.0 * e + 6.0 * x.rho + (cfg.n - 2.0) * 3.0 * x.rho;
        j.dt = -e * x.x1 * x.x1;
        return j;
    };
    for (AxiPoint x : {AxiPoint{1.2, 0.4}, AxiPoint{2.0, 1.1}}) {
        const double exact = apply_S(jet, x, 0.3, cfg);
        CHECK(apply_S_fd(value, x, 0.3, cfg, 1e-4, 1e-5) == doctest::Approx(exact).epsilon(1e-6));
    }
    CHECK_THROWS_AS((void)apply_S(jet, AxiPoint{0.0, 1.0}, 0.0, cfg), ConfigError);
}

TEST_CASE("power_p, taylor_gap and nonlinear_N") {
    const auto cfg6 = DimensionConfig::make(6);
    const auto cfg7 = DimensionConfig::make(7);
    CHECK(power_p(-2.0, cfg6) == 4.0);
    CHECK(power_p(3.0, cfg7) == doctest::Approx(std::pow(3.0, 9.0 / 5.0)).epsilon(1e-15));
    for (double s : {1e-9, 1e-4, 0.1, 0.5}) {
        const double p = cfg7.p;
        const double direct = std::pow(1.0 - s, p) - 1.0 + p * s;
        CHECK(taylor_gap(s, p) == doctest::Approx(direct).epsilon(s > 1e-3 ? 1e-12 : 1e-6));
    }
    CHECK(taylor_gap(1e-9, 2.0) == doctest::Approx(1e-18).epsilon(1e-12));
    CHECK(nonlinear_N(3.0, 0.5, cfg6) == doctest::Approx(0.25).epsilon(1e-14));
    const double p = cfg7.p;
    CHECK(nonlinear_N(2.0, 0.3, cfg7) ==
          doctest::Approx(std::pow(2.3, p) - std::pow(2.0, p) - p * std::pow(2.0, p - 1.0) * 0.3).epsilon(1e-12));
}

TEST_CASE("scaled error terms reassemble S applied to the ansatz jets") {
    const ErrorModel model(make_ansatz());
    const auto& a = model.ansatz();
    const auto& cfg = a.cfg();
    for (double t : {2e-3, 8e-3}) {
        const PathState st = a.path().at(t);
        const double scale = std::pow(st.lam(), 0.5 * (cfg.n + 2));
        for (InnerPoint y : {InnerPoint{0.3, 0.2}, InnerPoint{-2.0, 1.0}, InnerPoint{5.0, 4.0}}) {
            const AxiPoint x = model.to_outer(y, st);
            const InnerPoint back = model.to_inner(x, st);
            CHECK(back.x1 == doctest::Approx(y.x1).epsilon(1e-6));
            const ScaledErrors e = model.scaled(y, st);
            const double size = std::pow(bubble_U(std::hypot(y.x1, y.rho), cfg), cfg.p);
            const double s1 = scale * apply_S(a.W1(x, t), x.x1, cfg);
            const double s2 = scale * apply_S(a.W2(x, t), x.x1, cfg);
            CHECK(std::abs(e.S_W1() - s1) < 1e-9 * size);
            CHECK(std::abs(e.S_W2() - s2) < 1e-9 * size);
            // E2 is the explicit form of e1 + e2 - corr with the cancellation done by hand
            const double E2 = model.E2_scaled(y, st);
            CHECK(std::abs(E2 - (e.e1 + e.e2 - e.corr)) < 1e-9 * size);
            const double etaR = cutoff_etaR(x, t, a).v;
            CHECK(std::abs(model.E2bar_scaled(y, st) - (e.S_W2() - etaR * E2)) < 1e-9 * size);
        }
    }
}

TEST_CASE("physical-variable error terms are the scaled ones divided by the lambda power") {
    const ErrorModel model(make_ansatz());
    const auto& a = model.ansatz();
    const double t = 5e-3;
    const PathState st = a.path().at(t);
    const AxiPoint x = model.to_outer({1.0, 0.5}, st);
    const ErrorsW1 w1 = model.error_terms_W1(x, t);
    const ErrorsW2 w2 = model.error_terms_W2(x, t);
    const double S = apply_S(a.W2(x, t), x.x1, a.cfg());
    const double sum = w1.e1 + w1.e2 + w1.e3 + w1.e4 - model.correction_term(x, t) + w2.e5 + w2.e6;
    const double size = std::pow(a.W0(x, t).v, a.cfg().p);
    CHECK(std::abs(sum - S) < 1e-9 * size);
}

TEST_CASE("inner expansion splits S[W2] and refuses points outside delta d") {
    const ErrorModel model(make_ansatz(), 0.1);
    const double t = 5e-3;
    const PathState st = model.ansatz().path().at(t);
    const InnerPoint y{0.5, 0.5};
    const InnerExpansion ex = model.inner_expansion_E2(y, t);
    CHECK(ex.E2_lambda + ex.E2_d + ex.E_remainder ==
          doctest::Approx(model.scaled(y, st).S_W2()).epsilon(1e-12));
    const double far = 0.2 * st.d() / st.lam();
    CHECK_THROWS_AS((void)model.inner_expansion_E2({far, 0.0}, t), ConfigError);
}

TEST_CASE("norm spec validation") {
    auto check = [](double alpha, double sigma, double a) { NormSpec{alpha, sigma, a}.validate(6); };
    CHECK_NOTHROW(check(0.1, 0.9, 0.3));
    CHECK_THROWS_AS(check(0.6, 0.9, 0.3), ConfigError);
    CHECK_THROWS_AS(check(0.1, 0.4, 0.3), ConfigError);
    CHECK_THROWS_AS(check(0.1, 0.9, 0.05), ConfigError);
    CHECK_THROWS_AS(check(0.1, 0.9, 1.2), ConfigError);
}

TEST_CASE("time weight norm of a power law") {
    // sup_s s^{-1} s^2 over s <= T is T
    CHECK(norm_delta([](double s) { return s * s; }, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("residual norm scan: bounded ratios and R^-2 regime") {
    const auto cfg = DimensionConfig::make(6);
    const ScanResult scan = residual_norm_scan(cfg, {1e-40, 1e-60, 1e-80}, {10.0, 20.0, 40.0}, NormSpec{});
    REQUIRE(scan.rows.size() == 9);
    for (const auto& row : scan.rows) {
        CHECK(row.ratio > 0.0);
        CHECK(row.ratio == doctest::Approx(row.norm / row.bound).epsilon(1e-12));
    }
    CHECK(scan.max_ratio <= 4.0 * scan.median_ratio);
    CHECK(scan.R_power == doctest::Approx(-2.0).epsilon(0.3));
    CHECK_THROWS_AS((void)residual_norm_scan(cfg, {}, {10.0}, NormSpec{}), ConfigError);
}

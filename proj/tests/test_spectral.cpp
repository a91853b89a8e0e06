#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/core_bubble.hpp"
#include "blowup/inner_modes.hpp"
#include "blowup/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blowup;

TEST_CASE("ground state eigenvalue agrees with an odeint shooting solution") {
    for (int n : {6, 7}) {
        const auto cfg = DimensionConfig::make(n);
        const EigenPair ep = negative_eigenpair(cfg, 40.0, 4000);
        const double shot = oracle::shooting_ground_state(n, 40.0, -30.0, -0.5);
        CHECK(ep.mu0 < 0.0);
        CHECK(ep.mu0 == doctest::Approx(shot).epsilon(1e-4));
    }
}

TEST_CASE("ground state is simple, positive and decays at rate sqrt|mu0|") {
    const auto cfg = DimensionConfig::make(6);
    const EigenPair ep = negative_eigenpair(cfg);
    CHECK(ep.gap > 1e-3);
    CHECK(ep.residual < 1e-8);
    const auto& Z = ep.Z;
    for (std::size_t i = 0; i + 1 < Z.size(); ++i) CHECK_MESSAGE(Z.values[i] > 0.0, "r = " << Z.grid[i]);
    CHECK(ep.decay_rate == doctest::Approx(std::sqrt(-ep.mu0)).epsilon(0.1));

    // ∫_ball Z² = 1 by an independent rule on the same interpolant
    const double mass = oracle::sphere_area(6) *
                        oracle::segment([&](double r) { return std::pow(Z(r), 2) * std::pow(r, 5); }, 0.0, 40.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("eigenvalue error against shooting shrinks at second order") {
    const auto cfg = DimensionConfig::make(6);
    const double shot = oracle::shooting_ground_state(6, 20.0, -30.0, -0.5);
    const double coarse = std::abs(negative_eigenpair(cfg, 20.0, 1000).mu0 - shot);
    const double fine = std::abs(negative_eigenpair(cfg, 20.0, 2000).mu0 - shot);
    MESSAGE("errors " << coarse << " " << fine);
    CHECK(std::log2(coarse / fine) > 1.8);
}

TEST_CASE("radial operator is symmetric with an M-matrix off-diagonal") {
    const auto cfg = DimensionConfig::make(6);
    const RadialOperator op = RadialOperator::build(cfg, 10.0, 200);
    REQUIRE(op.offdiag.size() + 1 == op.diag.size());
    CHECK(std::all_of(op.offdiag.begin(), op.offdiag.end(), [](double v) { return v < 0.0; }));
    const auto ev = op.lowest_eigenvalues(3);
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] < 0.0);
    CHECK(ev[1] > 0.0);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
}

TEST_CASE("coercivity: positive on the orthogonal complement, negative without the constraint") {
    const auto cfg = DimensionConfig::make(6);
    std::vector<double> gammas;
    for (double R : {10.0, 20.0, 40.0}) {
        const CoercivityResult c = coercivity_constant(cfg, R, 2000);
        CHECK(c.gamma_R > 0.0);
        CHECK(c.constrained_min > 0.0);
        CHECK(c.unconstrained_min < 0.0);
        CHECK(c.projection_overlap < 1e-6);
        gammas.push_back(c.gamma_R);
    }
    const auto [lo, hi] = std::minmax_element(gammas.begin(), gammas.end());
    CHECK(*hi / *lo < 3.0);
}

TEST_CASE("second kernel solution: constant Wronskian, unit limit, solves the kernel equation") {
    const auto cfg = DimensionConfig::make(6);
    const TildeZ tz(cfg, geometric_grid(1e-3, 1e3, 2048, false));
    for (double r : {0.05, 0.5, 0.99, 1.01, 3.0, 50.0}) {
        const double w = std::pow(r, 5) * (kernel_Z0(r, cfg) * tz.derivative(r) - kernel_dZ0(r, cfg) * tz.value(r));
        CHECK(w == doctest::Approx(tz.wronskian()).epsilon(1e-6));
    }
    CHECK(tz.value(900.0) == doctest::Approx(1.0).epsilon(1e-5));
    auto f = [&](double r) { return tz.value(r); };
    for (double r : {0.3, 1.0, 2.5, 8.0}) {
        const double h = 1e-3 * std::max(1.0, r);
        const double scale = std::abs(tz.value(r)) + std::abs(oracle::d2(f, r, h));
        CHECK(std::abs(apply_L0_fd(f, r, cfg, h)) / scale < 1e-6);
    }
    const RadialProfile p = tilde_Z(cfg, geometric_grid(1e-3, 100.0, 400, false));
    CHECK(p(2.0) == doctest::Approx(tz.value(2.0)).epsilon(1e-5));
}

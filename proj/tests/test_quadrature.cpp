#include <cmath>
#include <numbers>

#include "blowup/quadrature.hpp"
#include "blowup/radial_profile.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blowup;

TEST_CASE("sphere area matches the gamma-function formula") {
    for (int n = 2; n <= 12; ++n) CHECK(sphere_area(n) == doctest::Approx(oracle::sphere_area(n)).epsilon(1e-14));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("20-point Gauss-Legendre integrates degree-39 polynomials exactly") {
    const double got = gauss_legendre([](double x) { return std::pow(x, 39) + std::pow(x, 38); }, 0.0, 1.0);
    CHECK(got == doctest::Approx(1.0 / 40.0 + 1.0 / 39.0).epsilon(1e-14));
}

TEST_CASE("radial integral of a Gaussian over R^n") {
    for (int n : {6, 7, 9}) {
        const auto cfg = DimensionConfig::make(n);
        const QuadResult q = radial_integral([](double r) { return std::exp(-r * r); }, cfg);
        const double exact = std::pow(std::numbers::pi, 0.5 * n);
        CHECK(q.value == doctest::Approx(exact).epsilon(1e-11));
        CHECK(std::abs(q.value - exact) <= q.error);
    }
}

TEST_CASE("half-line integral of an algebraic tail") {
    const QuadResult q = half_line_integral([](double r) { return 1.0 / (1.0 + r * r); });
    CHECK(q.value == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-10));
}

TEST_CASE("Gauss-Gegenbauer rules reproduce weighted moments") {
    for (double lambda : {0.5, 1.0, 1.5, 2.5}) {
        const GaussRule rule = gauss_gegenbauer_rule(8, lambda);
        for (int k : {0, 2, 6, 14}) {
            double got = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) got += rule.weights[i] * std::pow(rule.nodes[i], k);
            const double want = oracle::segment(
                [&](double x) { return std::pow(x, k) * std::pow(1.0 - x * x, lambda - 0.5); }, -1.0, 1.0);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("Gauss-Legendre rule is the Gegenbauer rule with lambda = 1/2") {
    const GaussRule a = gauss_legendre_rule(12), b = gauss_gegenbauer_rule(12, 0.5);
    REQUIRE(a.nodes.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(a.nodes[i] == doctest::Approx(b.nodes[i]).epsilon(1e-15));
        CHECK(a.weights[i] == doctest::Approx(b.weights[i]).epsilon(1e-15));
    }
}

TEST_CASE("cumulative integral is anchored and exact for smooth data") {
    const auto grid = geometric_grid(1e-3, 10.0, 50);
    const auto F = cumulative_integral(grid, [](double r) { return std::cos(r); }, grid.size() - 1);
    for (std::size_t i = 0; i < grid.size(); i += 7)
        CHECK(F[i] == doctest::Approx(std::sin(grid[i]) - std::sin(10.0)).epsilon(1e-12));
    CHECK(F.back() == 0.0);
}

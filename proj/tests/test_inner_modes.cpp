#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/inner_modes.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blowup;

namespace {

double a0(double r) { return std::exp(-r * r); }
double b1(double r) { return r * std::exp(-0.5 * r * r); }
double c2(double r) { return r * r / (1.0 + r * r * r * r); }

/// ℒk f = f'' + (n-1)/r f' - k(n-1)/r² f + pU^{p-1} f from five-point differences.
double Lk(const std::function<double(double)>& f, double r, int k, const DimensionConfig& cfg, double h) {
    const oracle::Bubble b{cfg.n};
    return oracle::radial_laplacian(f, r, cfg.n, h) - k * (cfg.n - 1.0) / (r * r) * f(r) +
           b.p() * b.potential(r) * f(r);
}

}  // namespace

TEST_CASE("decompose recovers the modes of an axisymmetric field") {
    const auto cfg = DimensionConfig::make(6);
    const int n = cfg.n;
    auto field = [&](InnerPoint y) {
        const double r = std::hypot(y.x1, y.rho);
        const double c = r > 0.0 ? y.x1 / r : 0.0;
        return a0(r) + b1(r) * c + c2(r) * (n * c * c - 1.0);
    };
    SphereSampling sampling;
    for (int k = 1; k <= 16; ++k) sampling.radii.push_back(0.25 * k);
    const ModeDecomposition d = decompose(field, sampling, cfg);
    REQUIRE(d.h1.size() == std::size_t(n));
    for (std::size_t k = 0; k < sampling.radii.size(); ++k) {
        const double r = sampling.radii[k];
        CHECK(std::abs(d.h0.values[k] - a0(r)) < 1e-12);
        CHECK(d.h1[0].values[k] == doctest::Approx(b1(r)).epsilon(1e-12));
        for (int j = 1; j < n; ++j) CHECK(std::abs(d.h1[j].values[k]) < 1e-14);
    }
    CHECK(d.hperp_energy > 0.0);
    CHECK(d.parseval_defect < 1e-10);
    CHECK(d.resolution_defect < 1e-10);
}

TEST_CASE("decompose on general fields matches the axisymmetric path") {
    const auto cfg = DimensionConfig::make(6);
    SphereSampling sampling{{0.5, 1.0, 2.0}, 8};
    // first moment along y2, plus a pure second harmonic y1 y3
    auto general = [&](std::span<const double> y) {
        double r2 = 0.0;
        for (double v : y) r2 += v * v;
        const double r = std::sqrt(r2);
        return a0(r) + b1(r) * y[1] / r + y[0] * y[2];
    };
    const ModeDecomposition d = decompose(general, sampling, cfg);
    for (std::size_t k = 0; k < 3; ++k) {
        const double r = sampling.radii[k];
        CHECK(d.h0.values[k] == doctest::Approx(a0(r)).epsilon(1e-10));
        CHECK(d.h1[1].values[k] == doctest::Approx(b1(r)).epsilon(1e-10));
        CHECK(std::abs(d.h1[0].values[k]) < 1e-12);
    }
    CHECK(d.parseval_defect < 1e-10);
}

TEST_CASE("mode-0 inverse: finite-difference round trip and agreement with h") {
    const auto cfg = DimensionConfig::make(6);
    const PiProfile pi(cfg);
    Mode0InverseOptions opts;
    opts.R = 20.0;
    const Mode0Inverse H = mode0_inverse([&](double r) { return pi(r); }, cfg, opts);
    CHECK(H.orthogonality_defect() < 1e-2);

    const double c = H(0.0) / kernel_Z0(0.0, cfg);
    double worst = 0.0;
    for (double r = 0.1; r < 1.8 * opts.R; r += 0.37) {
        const double h = 3e-3 * std::max(1.0, r);
        worst = std::max(worst, std::abs(Lk([&](double s) { return H(s) - c * kernel_Z0(s, cfg); }, r, 0, cfg, h) + pi(r)));
    }
    CHECK(worst < 1e-5);

    // H = -h + (multiple of Z0): the two constructions differ only by the
    // tail of the forcing beyond 2R, which pairs into Z0.
    const CorrectionH hc(cfg);
    const double k = (H(0.0) + hc.value(0.0)) / kernel_Z0(0.0, cfg);
    double gap = 0.0, size = 0.0;
    for (double r = 0.0; r < 2.0 * opts.R; r += 0.25) {
        gap = std::max(gap, std::abs(H(r) + hc.value(r) - k * kernel_Z0(r, cfg)));
        size = std::max(size, std::abs(hc.value(r)));
    }
    CHECK(gap < 1e-5 * size);
}

TEST_CASE("mode-0 inverse refuses a forcing that is not orthogonal to Z0") {
    const auto cfg = DimensionConfig::make(6);
    CHECK_THROWS_AS((void)mode0_inverse([&](double r) { return kernel_Z0(r, cfg); }, cfg), NumericalError);
}

TEST_CASE("mode-1 inverse: round trip, Dirichlet edge and R-independent conditioning") {
    const auto cfg = DimensionConfig::make(6);
    const auto g = [](double r) { return std::exp(-r * r) * (1.0 - r * r); };
    for (double R : {10.0, 20.0}) {
        const Mode1Inverse phi = mode1_inverse(g, R, cfg);
        CHECK(phi(2.0 * R) == 0.0);
        double worst = 0.0;
        for (double r = 0.1; r < 1.8 * R; r += 0.29) {
            const double h = 3e-3 * std::max(1.0, r);
            const double l = Lk([&](double s) { return bubble_dU(s, cfg) * phi.factor_change(r, s); }, r, 1, cfg, h);
            worst = std::max(worst, std::abs(l + g(r)));
        }
        CHECK(worst < 1e-5);
        CHECK(phi.factor_change(0.3, 0.7) == doctest::Approx(phi.factor(0.7) - phi.factor(0.3)).epsilon(1e-6));
        auto v = [&](double r) { return phi(r); };
        CHECK(phi.derivative(1.7) == doctest::Approx(oracle::d1(v, 1.7, 1e-3)).epsilon(1e-7));
    }
}

TEST_CASE("FD operators annihilate the kernels") {
    const auto cfg = DimensionConfig::make(7);
    for (double r : {0.4, 1.0, 3.0}) {
        const double Z0 = apply_L0_fd([&](double s) { return kernel_Z0(s, cfg); }, r, cfg, 1e-3);
        const double Z1 = apply_L1_fd([&](double s) { return bubble_dU(s, cfg); }, r, cfg, 1e-3);
        CHECK(std::abs(Z0) < 1e-6 * std::abs(kernel_Z0(0.0, cfg)));
        CHECK(std::abs(Z1) < 1e-6 * std::abs(kernel_Z0(0.0, cfg)));
    }
}

TEST_CASE("parabolic mode-0 problem: projection removes the unstable growth") {
    const auto cfg = DimensionConfig::make(6);
    const PiProfile pi(cfg);
    auto forcing = [&](double r, double) { return pi(r); };
    const double mu0 = std::abs(negative_eigenpair(cfg).mu0);
    const double tau_end = 1.0 + 5.0 / mu0;
    const ParabolicSolution proj = mode0_parabolic(forcing, 20.0, 1.0, tau_end, cfg);
    ParabolicOptions free;
    free.project = false;
    const ParabolicSolution bare = mode0_parabolic(forcing, 20.0, 1.0, tau_end, cfg, free);
    CHECK(proj.mu0 == doctest::Approx(-mu0).epsilon(1e-3));
    CHECK(proj.growth_rate < 0.5);
    CHECK(bare.growth_rate == doctest::Approx(mu0).epsilon(0.1));
    CHECK(std::abs(bare.phi(0.0) / proj.phi(0.0)) > 10.0);
    for (const auto& rec : proj.trace) CHECK(std::abs(rec.z_mass) < 1e-8 * (1.0 + rec.sup_phi));
}

TEST_CASE("parabolic problem forced by the ground state stays at zero") {
    const auto cfg = DimensionConfig::make(6);
    ParabolicOptions opts;
    const ParabolicSolution probe = mode0_parabolic([](double, double) { return 0.0; }, 10.0, 1.0, 1.1, cfg, opts);
    const RadialProfile Z = probe.Z;
    const ParabolicSolution sol = mode0_parabolic([&](double r, double) { return Z(r); }, 10.0, 1.0, 2.0, cfg, opts);
    double zmax = 0.0;
    for (double v : Z.values) zmax = std::max(zmax, std::abs(v));
    CHECK(sol.trace.back().sup_phi < 1e-6 * zmax);
    CHECK(sol.trace.back().c == doctest::Approx(1.0).epsilon(1e-6));
}

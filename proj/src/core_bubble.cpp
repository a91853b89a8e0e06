#include "blowup/core_bubble.hpp"

#include <cmath>
#include <utility>

#include "blowup/errors.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

namespace {

double scale_c0(const DimensionConfig& cfg) { return 0.5 * cfg.alpha_n * (cfg.n - 2); }

double one_plus_r2_pow(double r, double e) { return std::pow(1.0 + r * r, e); }

}  // namespace

double bubble_U(double r, const DimensionConfig& cfg) {
    return cfg.alpha_n * one_plus_r2_pow(r, -0.5 * (cfg.n - 2));
}

double bubble_dU(double r, const DimensionConfig& cfg) {
    return -(cfg.n - 2) * cfg.alpha_n * r * one_plus_r2_pow(r, -0.5 * cfg.n);
}

double bubble_d2U(double r, const DimensionConfig& cfg) {
    return -(cfg.n - 2) * cfg.alpha_n * one_plus_r2_pow(r, -0.5 * cfg.n - 1.0) *
           (1.0 - (cfg.n - 1) * r * r);
}

double bubble_potential(double r, const DimensionConfig& cfg) {
    const double q = 1.0 + r * r;
    return cfg.n * (cfg.n - 2.0) / (q * q);
}

double kernel_Z0(double r, const DimensionConfig& cfg) {
    return scale_c0(cfg) * (1.0 - r * r) * one_plus_r2_pow(r, -0.5 * cfg.n);
}

double kernel_dZ0(double r, const DimensionConfig& cfg) {
    const int n = cfg.n;
    return scale_c0(cfg) * r * one_plus_r2_pow(r, -0.5 * n - 1.0) * ((n - 2) * r * r - (n + 2));
}

double kernel_d2Z0(double r, const DimensionConfig& cfg) {
    const int n = cfg.n;
    const double q = r * one_plus_r2_pow(r, -0.5 * n - 1.0);
    const double dq = one_plus_r2_pow(r, -0.5 * n - 2.0) * (1.0 - (n + 1) * r * r);
    const double m = (n - 2) * r * r - (n + 2);
    const double dm = 2.0 * (n - 2) * r;
    return scale_c0(cfg) * (dq * m + q * dm);
}

double kernel_Z0_over_rm1(double r, const DimensionConfig& cfg) {
    return -scale_c0(cfg) * (1.0 + r) * one_plus_r2_pow(r, -0.5 * cfg.n);
}

double kernel_Z1(AxiPoint y, const DimensionConfig& cfg) {
    const double r2 = y.x1 * y.x1 + y.rho * y.rho;
    return -(cfg.n - 2) * cfg.alpha_n * y.x1 * std::pow(1.0 + r2, -0.5 * cfg.n);
}

BubbleIntegrals bubble_integrals(const DimensionConfig& cfg) {
    const auto up = radial_integral([&](double r) { return std::pow(bubble_U(r, cfg), cfg.p); }, cfg);
    const auto a0 = radial_integral(
        [&](double r) { return bubble_potential(r, cfg) * kernel_Z0(r, cfg); }, cfg);
    const auto a1 = radial_integral(
        [&](double r) {
            const double z = kernel_Z0(r, cfg);
            return z * z;
        },
        cfg);
    if (!up.converged || !a0.converged || !a1.converged) {
        throw NumericalError("bubble_integrals: quadrature did not converge");
    }
    return {up.value, a0.value, a1.value, std::max({up.error, a0.error, a1.error})};
}

PiProfile::PiProfile(const DimensionConfig& cfg, const BubbleIntegrals& ints) : cfg_(cfg) {
    pot_coeff_ = cfg.p * cfg.alpha_n / std::ldexp(1.0, cfg.n - 2);
    z0_coeff_ = pot_coeff_ * ints.Upm1_Z0 / ints.Z0_sq;
}

PiProfile::PiProfile(const DimensionConfig& cfg) : PiProfile(cfg, bubble_integrals(cfg)) {}

double PiProfile::operator()(double r) const {
    return z0_coeff_ * kernel_Z0(r, cfg_) - pot_coeff_ * bubble_potential(r, cfg_);
}

double PiProfile::derivative(double r) const {
    const double q = 1.0 + r * r;
    const double dpot = -4.0 * cfg_.n * (cfg_.n - 2.0) * r / (q * q * q);
    return z0_coeff_ * kernel_dZ0(r, cfg_) - pot_coeff_ * dpot;
}

double pi_profile(double r, const DimensionConfig& cfg, const BubbleIntegrals& ints) {
    return PiProfile(cfg, ints)(r);
}

double constant_ell(const DimensionConfig& cfg, const BubbleIntegrals& ints) {
    const double n = cfg.n;
    const double base = (n - 3.0) / (n - 4.0) * std::ldexp(1.0, cfg.n - 1) / (cfg.alpha_n * (n - 2.0)) *
                        ints.Z0_sq / ints.U_p;
    return std::pow(base, 1.0 / (n - 4.0));
}

double constant_ell(const DimensionConfig& cfg) { return constant_ell(cfg, bubble_integrals(cfg)); }

std::vector<double> default_radial_grid(double r_max, int nodes) {
    return geometric_grid(1e-3, r_max, nodes, true);
}

CorrectionH::CorrectionH(const DimensionConfig& cfg, double r_max, int nodes) : cfg_(cfg) {
    forcing_ = [pi = PiProfile(cfg)](double r) { return pi(r); };
    auto grid = default_radial_grid(r_max, nodes);
    const TildeZ tz(cfg, std::vector<double>(grid.begin() + 1, grid.end()));
    build(tz, std::move(grid));
}

CorrectionH::CorrectionH(const DimensionConfig& cfg, const RealFn& forcing, std::vector<double> grid)
    : cfg_(cfg), forcing_(forcing) {
    if (grid.empty() || grid.front() != 0.0) {
        throw ConfigError("CorrectionH: grid must start at the origin");
    }
    const TildeZ tz(cfg, std::vector<double>(grid.begin() + 1, grid.end()));
    build(tz, std::move(grid));
}

void CorrectionH::build(const TildeZ& tz, std::vector<double> grid) {
    const int n = cfg_.n;
    const double w = tz.wronskian();
    if (!std::isfinite(w) || std::abs(w) < 1e-300) {
        throw NumericalError("correction_h: degenerate Wronskian of (Z0, Z~)");
    }
    const auto i0 = cumulative_integral(grid, [&](double s) {
        return kernel_Z0(s, cfg_) * forcing_(s) * std::pow(s, n - 1);
    });
    const auto i1 = cumulative_integral(grid, [&](double s) {
        return s > 0.0 ? tz.value(s) * forcing_(s) * std::pow(s, n - 1) : 0.0;
    });
    std::vector<double> h(grid.size()), dh(grid.size()), d2h(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        if (r == 0.0) {
            h[i] = 0.0;
            dh[i] = 0.0;
            d2h[i] = forcing_(0.0) / n;
            continue;
        }
        h[i] = (tz.value(r) * i0[i] - kernel_Z0(r, cfg_) * i1[i]) / w;
        dh[i] = (tz.derivative(r) * i0[i] - kernel_dZ0(r, cfg_) * i1[i]) / w;
        d2h[i] = forcing_(r) - bubble_potential(r, cfg_) * cfg_.p * h[i] - (n - 1) * dh[i] / r;
    }
    wronskian_ = w;
    h_ = RadialProfile{"h", n, grid, h, dh, 2.0};
    dh_ = RadialProfile{"dh", n, std::move(grid), std::move(dh), std::move(d2h), 3.0};
}

double CorrectionH::value(double r) const { return h_(r); }
double CorrectionH::d1(double r) const { return dh_(r); }

double CorrectionH::d2(double r) const {
    if (r == 0.0) return forcing_(0.0) / cfg_.n;
    if (r > h_.grid.back()) return 6.0 * h_(r) / (r * r);
    return forcing_(r) - cfg_.p * bubble_potential(r, cfg_) * h_(r) - (cfg_.n - 1) * dh_(r) / r;
}

double CorrectionH::scaling_derivative(double r) const {
    return 0.5 * (cfg_.n - 2) * value(r) + r * d1(r);
}

RadialProfile correction_h(const DimensionConfig& cfg, double r_max) {
    return CorrectionH(cfg, r_max).profile();
}

}  // namespace blowup

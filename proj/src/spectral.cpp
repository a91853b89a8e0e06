#include "blowup/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>
#include <lapacke.h>

#include "blowup/core_bubble.hpp"
#include "blowup/errors.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

namespace bq = boost::math::quadrature;

// ---------------------------------------------------------------- TildeZ --

TildeZ::TildeZ(const DimensionConfig& cfg, std::vector<double> grid)
    : cfg_(cfg), grid_(std::move(grid)) {
    if (grid_.size() < 2 || grid_.front() <= 0.0) {
        throw ConfigError("TildeZ: grid must be positive with at least two nodes");
    }
    const int n = cfg_.n;
    const double c0 = 0.5 * cfg_.alpha_n * (n - 2);
    pole_ = std::ldexp(1.0, n - 2) / (c0 * c0);
    far_coeff_ = n * (n + 2.0) / (2.0 * (n - 4.0));

    // anchor the antiderivative at the node closest to r = 1
    const auto closest = std::min_element(grid_.begin(), grid_.end(), [](double a, double b) {
        return std::abs(a - 1.0) < std::abs(b - 1.0);
    });
    const std::size_t anchor = static_cast<std::size_t>(closest - grid_.begin());
    const double offset = bq::gauss<double, 20>::integrate([this](double s) { return integrand(s); },
                                                           1.0, grid_[anchor]);
    const auto log_form = [this](double s) { return integrand(s); };
    g_.assign(grid_.size(), 0.0);
    g_[anchor] = offset;
    for (std::size_t i = anchor + 1; i < grid_.size(); ++i) {
        g_[i] = g_[i - 1] + bq::gauss<double, 10>::integrate(log_form, grid_[i - 1], grid_[i]);
    }
    for (std::size_t i = anchor; i-- > 0;) {
        g_[i] = g_[i + 1] - bq::gauss<double, 10>::integrate(log_form, grid_[i], grid_[i + 1]);
    }
    const double rN = grid_.back();
    const double raw = kernel_Z0(rN, cfg_) * g_.back() - pole_ * kernel_Z0_over_rm1(rN, cfg_);
    norm_ = raw / (1.0 + far_coeff_ / (rN * rN));
    if (!std::isfinite(norm_) || norm_ == 0.0) throw NumericalError("TildeZ: normalization failed");
}

// 1/(s^{n-1} Z0^2) minus its double pole at s = 1. With x = s - 1 the ratio
// g(s)/g(1) = exp(phi), phi = O(x^2), evaluated through log1p to keep the
// cancellation of the O(x) terms harmless.
double TildeZ::integrand(double s) const {
    const double x = s - 1.0;
    const int n = cfg_.n;
    if (std::abs(x) < 1e-7) return pole_ * (2.0 * n - 1.0) / 4.0;
    const double phi = -(n - 1.0) * std::log1p(x) - 2.0 * std::log1p(0.5 * x) +
                       n * std::log1p(0.5 * x * (x + 2.0));
    return pole_ * std::expm1(phi) / (x * x);
}

double TildeZ::antiderivative(double r) const {
    const auto f = [this](double s) { return integrand(s); };
    // geometric sub-panels keep Gauss-Legendre accurate on power-law integrands
    const auto span_integral = [&f](double a, double b) {
        const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(std::log(b / a)) / 0.1)));
        const double q = std::pow(b / a, 1.0 / panels);
        double acc = 0.0, lo = a;
        for (int k = 0; k < panels; ++k) {
            const double hi = (k + 1 == panels) ? b : lo * q;
            acc += bq::gauss<double, 10>::integrate(f, lo, hi);
            lo = hi;
        }
        return acc;
    };
    if (r <= grid_.front()) return g_.front() - span_integral(r, grid_.front());
    const std::size_t i = locate_cell(grid_, r);
    return g_[i] + span_integral(grid_[i], r);
}

double TildeZ::value(double r) const {
    if (r > grid_.back()) return 1.0 + far_coeff_ / (r * r);
    const double raw =
        kernel_Z0(r, cfg_) * antiderivative(r) - pole_ * kernel_Z0_over_rm1(r, cfg_);
    return raw / norm_;
}

double TildeZ::derivative(double r) const {
    if (r > grid_.back()) return -2.0 * far_coeff_ / (r * r * r);
    const int n = cfg_.n;
    const double c0 = 0.5 * cfg_.alpha_n * (n - 2);
    const double q2 = std::pow(1.0 + r * r, -0.5 * n);
    const double dq = -c0 * (q2 - n * r * (1.0 + r) * q2 / (1.0 + r * r));
    const double raw = kernel_dZ0(r, cfg_) * antiderivative(r) + kernel_Z0(r, cfg_) * integrand(r) -
                       pole_ * dq;
    return raw / norm_;
}

RadialProfile TildeZ::profile() const {
    RadialProfile p{"tilde_Z", cfg_.n, grid_, {}, {}, 0.0};
    p.values.reserve(grid_.size());
    p.slopes.reserve(grid_.size());
    for (double r : grid_) {
        p.values.push_back(value(r));
        p.slopes.push_back(derivative(r));
    }
    return p;
}

RadialProfile tilde_Z(const DimensionConfig& cfg, std::span<const double> grid) {
    std::vector<double> g;
    for (double r : grid) {
        if (r > 0.0) g.push_back(r);
    }
    return TildeZ(cfg, std::move(g)).profile();
}

// -------------------------------------------------------- RadialOperator --

RadialOperator RadialOperator::build(const DimensionConfig& cfg, double radius, int cells,
                                     double grading) {
    if (cells < 8 || !(radius > 0.0)) throw ConfigError("RadialOperator: need cells >= 8, radius > 0");
    const int n = cfg.n;
    std::vector<double> r(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) {
        const double xi = static_cast<double>(i) / cells;
        r[static_cast<std::size_t>(i)] =
            grading > 0.0 ? radius * std::sinh(grading * xi) / std::sinh(grading) : radius * xi;
    }
    r.back() = radius;
    const std::size_t N = static_cast<std::size_t>(cells);
    RadialOperator op;
    op.radius = radius;
    op.nodes.assign(r.begin(), r.end() - 1);
    op.volume.resize(N);
    std::vector<double> flux(N);  // flux[i] couples i and i+1
    for (std::size_t i = 0; i < N; ++i) {
        const double lo = i == 0 ? 0.0 : 0.5 * (r[i - 1] + r[i]);
        const double hi = 0.5 * (r[i] + r[i + 1]);
        op.volume[i] = (std::pow(hi, n) - std::pow(lo, n)) / n;
        flux[i] = std::pow(hi, n - 1) / (r[i + 1] - r[i]);
    }
    op.diag.resize(N);
    op.offdiag.resize(N - 1);
    for (std::size_t i = 0; i < N; ++i) {
        const double a = flux[i] + (i > 0 ? flux[i - 1] : 0.0) -
                         op.volume[i] * cfg.p * bubble_potential(r[i], cfg);
        op.diag[i] = a / op.volume[i];
        if (i + 1 < N) op.offdiag[i] = -flux[i] / std::sqrt(op.volume[i] * op.volume[i + 1]);
    }
    return op;
}

std::vector<double> RadialOperator::lowest_eigenvalues(int k) const {
    const auto N = static_cast<lapack_int>(diag.size());
    std::vector<double> w(diag.size());
    std::vector<lapack_int> iblock(diag.size()), isplit(diag.size());
    lapack_int m = 0, nsplit = 0;
    const lapack_int info =
        LAPACKE_dstebz('I', 'E', N, 0.0, 0.0, 1, k, 2.0 * DBL_MIN, diag.data(), offdiag.data(), &m,
                       &nsplit, w.data(), iblock.data(), isplit.data());
    if (info != 0 || m != k) throw NumericalError(fmt::format("dstebz failed (info={})", info));
    w.resize(static_cast<std::size_t>(k));
    return w;
}

std::vector<double> RadialOperator::eigenvector(double shift, std::span<const double> deflate,
                                                int iterations) const {
    const std::size_t N = diag.size();
    std::vector<double> defl_sym;  // deflation vector in symmetric variables
    if (!deflate.empty()) {
        defl_sym.resize(N);
        for (std::size_t i = 0; i < N; ++i) defl_sym[i] = deflate[i] * std::sqrt(volume[i]);
        const double nn = std::sqrt(std::inner_product(defl_sym.begin(), defl_sym.end(),
                                                       defl_sym.begin(), 0.0));
        for (double& v : defl_sym) v /= nn;
    }
    const auto project = [&](std::vector<double>& x) {
        if (defl_sym.empty()) return;
        const double c = std::inner_product(x.begin(), x.end(), defl_sym.begin(), 0.0);
        for (std::size_t i = 0; i < N; ++i) x[i] -= c * defl_sym[i];
    };
    std::vector<double> x(N, 1.0);
    for (std::size_t i = 0; i < N; ++i) x[i] = 1.0 + 0.1 * std::cos(0.37 * static_cast<double>(i));
    project(x);
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> dl(offdiag), du(offdiag), d(N);
        for (std::size_t i = 0; i < N; ++i) d[i] = diag[i] - shift;
        const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(N), 1,
                                              dl.data(), d.data(), du.data(), x.data(),
                                              static_cast<lapack_int>(N));
        if (info != 0) throw NumericalError(fmt::format("inverse iteration: dgtsv info={}", info));
        project(x);
        const double nn = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
        for (double& v : x) v /= nn;
    }
    for (std::size_t i = 0; i < N; ++i) x[i] /= std::sqrt(volume[i]);
    return x;
}

// ------------------------------------------------------------ eigenpair --

EigenPair negative_eigenpair(const DimensionConfig& cfg, double radius, int cells) {
    const auto op = RadialOperator::build(cfg, radius, cells);
    const auto ev = op.lowest_eigenvalues(2);
    if (!(ev[0] < 0.0)) {
        throw NumericalError("negative_eigenpair: no negative eigenvalue (domain or resolution too small)");
    }
    EigenPair out;
    out.mu0 = ev[0];
    out.gap = (ev[1] - ev[0]) / std::abs(ev[0]);
    if (out.gap < 1e-3) throw NumericalError("negative_eigenpair: lowest eigenvalue numerically degenerate");

    auto u = op.eigenvector(1.1 * ev[0]);
    const double omega = sphere_area(cfg.n);
    double mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mass += op.volume[i] * u[i] * u[i];
    const double scale = (u[0] < 0.0 ? -1.0 : 1.0) / std::sqrt(omega * mass);
    for (double& v : u) v *= scale;

    // residual of the symmetric problem mapped back to node values
    const std::size_t N = u.size();
    double res = 0.0, umax = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double si = std::sqrt(op.volume[i]);
        double bu = op.diag[i] * u[i] * si;
        if (i > 0) bu += op.offdiag[i - 1] * u[i - 1] * std::sqrt(op.volume[i - 1]);
        if (i + 1 < N) bu += op.offdiag[i] * u[i + 1] * std::sqrt(op.volume[i + 1]);
        res = std::max(res, std::abs(bu / si - out.mu0 * u[i]));
        umax = std::max(umax, std::abs(u[i]));
    }
    out.residual = res / umax;

    for (double v : u) {
        if (!(v > 0.0)) throw NumericalError("negative_eigenpair: ground state changes sign");
    }
    // least-squares slope of log Z + (n-1)/2 log r on [R/2, 0.9R]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = op.nodes[i];
        if (r < 0.5 * radius || r > 0.9 * radius) continue;
        const double y = std::log(u[i]) + 0.5 * (cfg.n - 1) * std::log(r);
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        ++m;
    }
    out.decay_rate = m > 2 ? -(m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;

    out.Z.name = "Z";
    out.Z.dimension = cfg.n;
    out.Z.grid = op.nodes;
    out.Z.grid.push_back(radius);
    out.Z.values = u;
    out.Z.values.push_back(0.0);
    return out;
}

// ----------------------------------------------------------- coercivity --

namespace {

struct CoercivitySample {
    double lowest = 0.0;
    double constrained = 0.0;
    double overlap = 0.0;
};

CoercivitySample coercivity_sample(const DimensionConfig& cfg, double radius, int cells) {
    const auto op = RadialOperator::build(cfg, radius, cells);
    const auto ev = op.lowest_eigenvalues(2);
    const auto ground = op.eigenvector(1.1 * ev[0]);
    // minimizer of Q on the complement of the ground state
    const double shift = ev[1] - 1e-3 * (ev[1] - ev[0]);
    const auto phi = op.eigenvector(shift, ground, 40);
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        dot += op.volume[i] * phi[i] * ground[i];
        n1 += op.volume[i] * phi[i] * phi[i];
        n2 += op.volume[i] * ground[i] * ground[i];
    }
    if (!(ev[1] > ev[0])) throw NumericalError("coercivity: projection rank deficiency");
    return {ev[0], ev[1], std::abs(dot) / std::sqrt(n1 * n2)};
}

}  // namespace

CoercivityResult coercivity_constant(const DimensionConfig& cfg, double R, int cells) {
    const double ball = 2.0 * R;
    const auto coarse = coercivity_sample(cfg, ball, cells);
    const auto fine = coercivity_sample(cfg, ball, 2 * cells);
    CoercivityResult out;
    out.unconstrained_min = (4.0 * fine.lowest - coarse.lowest) / 3.0;
    out.constrained_min = (4.0 * fine.constrained - coarse.constrained) / 3.0;
    out.gamma_R = std::pow(R, cfg.n - 2) * out.constrained_min;
    out.projection_overlap = fine.overlap;
    return out;
}

}  // namespace blowup

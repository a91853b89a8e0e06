#include "blowup/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "blowup/errors.hpp"

namespace blowup {

std::size_t locate_cell(std::span<const double> grid, double r) {
    if (grid.size() < 2 || r <= grid.front()) return 0;
    if (r >= grid.back()) return grid.size() - 2;
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

namespace {

struct HermiteCell {
    double x0, x1, f0, f1, d0, d1;

    [[nodiscard]] double value(double x) const {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
               (t3 - t2) * h * d1;
    }
    [[nodiscard]] double slope(double x) const {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * f0 + (-6 * t2 + 6 * t) * f1) / h + (3 * t2 - 4 * t + 1) * d0 +
               (3 * t2 - 2 * t) * d1;
    }
};

}  // namespace

double RadialProfile::operator()(double r) const {
    if (grid.empty()) return 0.0;
    if (r > grid.back() && decay_exponent) {
        return values.back() * std::pow(grid.back() / r, *decay_exponent);
    }
    const std::size_t i = locate_cell(grid, r);
    if (grid.size() == 1) return values.front();
    if (!slopes.empty()) {
        return HermiteCell{grid[i], grid[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1]}
            .value(r);
    }
    const double t = (r - grid[i]) / (grid[i + 1] - grid[i]);
    return (1 - t) * values[i] + t * values[i + 1];
}

double RadialProfile::derivative(double r) const {
    if (grid.size() < 2) return 0.0;
    if (r > grid.back() && decay_exponent) {
        return -*decay_exponent * (*this)(r) / r;
    }
    const std::size_t i = locate_cell(grid, r);
    if (!slopes.empty()) {
        return HermiteCell{grid[i], grid[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1]}
            .slope(r);
    }
    return (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
}

void RadialProfile::validate(bool regular_at_origin) const {
    if (grid.size() != values.size() || (!slopes.empty() && slopes.size() != grid.size())) {
        throw NumericalError(fmt::format("profile {}: inconsistent array sizes", name));
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw NumericalError(fmt::format("profile {}: grid not increasing at {}", name, i));
        }
    }
    if (regular_at_origin && (grid.empty() || grid.front() != 0.0)) {
        throw NumericalError(fmt::format("profile {}: grid must start at the origin", name));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericalError(fmt::format("profile {}: non-finite value", name));
    }
}

void RadialProfile::write_csv(std::ostream& os) const {
    os << fmt::format("# profile={} n={}\n", name, dimension);
    os << "r,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g}\n", grid[i], values[i]);
    }
}

std::vector<double> geometric_grid(double r_first, double r_max, int nodes, bool include_origin) {
    if (nodes < 2 || !(r_first > 0.0) || !(r_max > r_first)) {
        throw ConfigError("geometric_grid: need nodes >= 2 and 0 < r_first < r_max");
    }
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(nodes) + 1);
    if (include_origin) g.push_back(0.0);
    const double ratio = std::log(r_max / r_first) / (nodes - 1);
    for (int i = 0; i < nodes; ++i) g.push_back(r_first * std::exp(ratio * i));
    g.back() = r_max;
    return g;
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
    std::vector<double> g(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / intervals;
    return g;
}

}  // namespace blowup

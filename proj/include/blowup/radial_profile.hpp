#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blowup {

/// Samples of a radial function on a strictly increasing grid.
///
/// When `slopes` is filled the profile interpolates with cubic Hermite
/// polynomials, otherwise linearly. Beyond the last node a known tail
/// r^{-k} (decay_exponent = k) is used when available.
struct RadialProfile {
    std::string name;
    int dimension = 0;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> slopes;
    std::optional<double> decay_exponent;

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] double derivative(double r) const;
    [[nodiscard]] std::size_t size() const { return grid.size(); }

    /// Throws NumericalError when the grid or values break the invariants.
    void validate(bool regular_at_origin) const;

    /// Two-column CSV with a one-line header naming the profile and n.
    void write_csv(std::ostream& os) const;
};

/// {0, r_1, ..., r_max}: the origin followed by `nodes` geometric nodes.
[[nodiscard]] std::vector<double> geometric_grid(double r_first, double r_max, int nodes,
                                                 bool include_origin = true);

/// Uniform grid with `intervals` cells on [a, b].
[[nodiscard]] std::vector<double> uniform_grid(double a, double b, int intervals);

/// Index i with grid[i] <= r < grid[i+1], clamped to a valid cell.
[[nodiscard]] std::size_t locate_cell(std::span<const double> grid, double r);

}  // namespace blowup

#include "blowup/dimension.hpp"

#include <cmath>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

DimensionConfig DimensionConfig::make(int n) {
    if (n < 6) {
        throw ConfigError("effective dimension n must be >= 6, got " + std::to_string(n));
    }
    const double nd = n;
    DimensionConfig c;
    c.n = n;
    c.p = (nd + 2.0) / (nd - 2.0);
    // U^{p-1}(0) must equal n(n-2) for U to solve the critical equation.
    c.alpha_n = std::pow(nd * (nd - 2.0), (nd - 2.0) / 4.0);
    c.gamma = (nd - 2.0) * (nd - 3.0) / (2.0 * (nd - 4.0));
    c.typeI_rate = (nd - 2.0) / 4.0;
    c.lam0_exponent = 1.0 + 1.0 / (nd - 4.0);
    return c;
}

}  // namespace blowup

#pragma once

namespace blowup {

/// Effective dimension n = d - 1 of the reduced problem and the constants
/// derived from it. Build through make(); the fields are never mutated.
struct DimensionConfig {
    int n = 6;
    double p = 2.0;              ///< (n+2)/(n-2)
    double alpha_n = 24.0;       ///< bubble amplitude, U(0)
    double gamma = 3.0;          ///< Type II rate (n-2)(n-3)/(2(n-4))
    double typeI_rate = 1.0;     ///< (n-2)/4
    double lam0_exponent = 1.5;  ///< 1 + 1/(n-4)

    /// Throws ConfigError for n < 6.
    static DimensionConfig make(int n);
};

}  // namespace blowup

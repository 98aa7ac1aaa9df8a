#pragma once

#include <functional>

namespace warpgeom {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    /// Upper limit of the geometric T-ladder used to probe improper integrals.
    double tail_max = 1e4;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Throws ConvergenceError
/// carrying the achieved error estimate when the subdivision budget runs out.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg);

/// ∫_a^∞ f via the map s = a + x/(1-x). Only the relative tolerance is
/// honoured, so exponentially small tails keep their significant digits.
QuadratureResult integrate_to_infinity(const Integrand& f, double a, const QuadratureConfig& cfg);

}  // namespace warpgeom

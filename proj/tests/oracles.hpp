#pragma once

// Test-only reference computations, kept independent of the library's code paths.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

/// Composite Simpson's rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Normal mass on [lo, hi] by quadrature.
inline double normal_mass(double lo, double hi, double mean, double sd) {
    return simpson([&](double x) { return normal_pdf(x, mean, sd); }, lo, hi);
}

/// Phi(z) by quadrature from the origin.
inline double phi(double z) {
    const double half = simpson([](double x) { return normal_pdf(x, 0.0, 1.0); }, 0.0, std::abs(z), 4000);
    return z >= 0 ? 0.5 + half : 0.5 - half;
}

/// Phi via erf, used where a closed form is needed at scale.
inline double phi_erf(double z) {
    return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2));
}

} // namespace oracle

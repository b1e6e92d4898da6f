#pragma once

#include <cmath>
#include <complex>

namespace xcir {

using Complex = std::complex<double>;

// exp(z) - 1 without cancellation near the origin
inline Complex cexpm1(Complex z) {
    if (std::abs(z) < 1e-4) {
        return z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    }
    return std::exp(z) - 1.0;
}

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace xcir

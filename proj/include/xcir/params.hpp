#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace xcir {

/*! Diffusion parameters of dX = kappa (theta - X) dt + sigma sqrt(X) dW
    plus the initial state. All four entries must be non-negative. */
struct CIRParams {
    double kappa = 0.0; // mean-reversion rate, 1/time
    double theta = 0.0; // long-term mean, state units
    double sigma = 0.0; // volatility, state units per sqrt(time)
    double x0 = 0.0;    // initial state

    // Feller condition 2*theta*kappa >= sigma^2: the continuous part
    // stays strictly positive when it holds and x0 > 0.
    bool feller() const { return 2.0 * theta * kappa >= sigma * sigma; }

    void validate() const {
        auto check = [](double v, const char* name) {
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument(std::string("CIRParams: ") + name +
                                            " must be finite and non-negative");
        };
        check(kappa, "kappa");
        check(theta, "theta");
        check(sigma, "sigma");
        check(x0, "x0");
    }

    bool operator==(const CIRParams&) const = default;
};

} // namespace xcir

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "xcir/common.hpp"
#include "xcir/params.hpp"
#include "xcir/rng.hpp"

namespace xcir {

/*! Exact transition law of the continuous CIR diffusion over an interval
    of length delta given state x:

        X_{t+delta} | X_t = x  ~  c * V,   V ~ noncentral-chisq(nu, lambda_nc)

    with  c = sigma^2 (1 - e^{-kappa delta}) / (4 kappa),
          nu = 4 kappa theta / sigma^2,
          lambda_nc = e^{-kappa delta} x / c. */
struct TransitionParams {
    double c = 0.0;
    double nu = 0.0;
    double lambda_nc = 0.0;
};

inline TransitionParams transition_params(const CIRParams& p, double x, double delta) {
    if (!(p.sigma > 0.0))
        throw std::domain_error("transition_params: degenerate diffusion; use deterministic transition");
    if (!(delta > 0.0)) throw std::invalid_argument("transition_params: delta must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("transition_params: x must be non-negative");

    TransitionParams tp;
    double kd = p.kappa * delta;
    if (kd < 1e-12) {
        // kappa -> 0 limit of (1 - e^{-kappa delta}) / kappa
        tp.c = 0.25 * p.sigma * p.sigma * delta;
    } else {
        tp.c = 0.25 * p.sigma * p.sigma * (-std::expm1(-kd)) / p.kappa;
    }
    tp.nu = 4.0 * p.kappa * p.theta / (p.sigma * p.sigma);
    tp.lambda_nc = std::exp(-kd) * x / tp.c;
    return tp;
}

/*! Noncentral chi-squared draw via the Poisson-Gamma mixture
    (valid for all nu >= 0, including nu < 1):
    K ~ Poisson(lambda/2), then Gamma((nu + 2K)/2, rate 1/2). */
inline double sample_noncentral_chisq(double nu, double lambda, Rng& rng) {
    if (!(nu >= 0.0) || !(lambda >= 0.0))
        throw std::invalid_argument("sample_noncentral_chisq: need nu >= 0, lambda >= 0");
    std::uint64_t k = rng.poisson(0.5 * lambda);
    double shape = 0.5 * nu + static_cast<double>(k);
    if (shape == 0.0) return 0.0;
    return rng.gamma(shape, 0.5);
}

// mean of the continuous CIR at horizon delta from state x; exact when
// kappa * delta == 0 (the drift leaves the mean untouched)
inline double cir_conditional_mean(const CIRParams& p, double x, double delta) {
    double kd = p.kappa * delta;
    if (kd == 0.0) return x;
    return p.theta + (x - p.theta) * std::exp(-kd);
}

/*! One exact draw from the CIR transition law. delta == 0 returns x;
    sigma == 0 follows the drift ODE deterministically. */
inline double sample_cir_exact(const CIRParams& p, double x, double delta, Rng& rng) {
    if (!(x >= 0.0)) throw std::invalid_argument("sample_cir_exact: x must be non-negative");
    if (!(delta >= 0.0)) throw std::invalid_argument("sample_cir_exact: delta must be non-negative");
    if (delta == 0.0) return x;
    if (p.sigma == 0.0) return cir_conditional_mean(p, x, delta);
    TransitionParams tp = transition_params(p, x, delta);
    return tp.c * sample_noncentral_chisq(tp.nu, tp.lambda_nc, rng);
}

/*! Characteristic exponents of the continuous CIR transition:

        E[exp(u X_{t+tau}) | X_t = x] = exp(phi + psi x),  Re(u) <= 0,

    from the noncentral chi-squared MGF:
        phi(tau, u) = -(nu/2) Log(1 - 2 u c)
        psi(tau, u) = u e^{-kappa tau} / (1 - 2 u c).
    The principal Log is safe: Re(1 - 2uc) >= 1 on the closed left
    half-plane, and psi maps C_- into C_-. */
struct PhiPsi {
    Complex phi{0.0, 0.0};
    Complex psi{0.0, 0.0};
};

inline PhiPsi cir_exponents(const CIRParams& p, double tau, Complex u) {
    if (!(tau >= 0.0)) throw std::invalid_argument("cir_exponents: tau must be non-negative");
    if (u.real() > 0.0)
        throw std::domain_error("cir_exponents: transform requires Re(u) <= 0");

    PhiPsi out;
    double kd = p.kappa * tau;
    double ekd = std::exp(-kd);

    if (p.sigma == 0.0) {
        // deterministic drift: X_{t+tau} = theta + (x - theta) e^{-kappa tau}
        out.phi = u * (p.theta * (-std::expm1(-kd)));
        out.psi = u * ekd;
        return out;
    }

    double c = (kd < 1e-12) ? 0.25 * p.sigma * p.sigma * tau
                            : 0.25 * p.sigma * p.sigma * (-std::expm1(-kd)) / p.kappa;
    double nu = 4.0 * p.kappa * p.theta / (p.sigma * p.sigma);
    Complex denom = 1.0 - 2.0 * u * c;
    out.phi = -0.5 * nu * std::log(denom);
    out.psi = u * ekd / denom;
    return out;
}

/*! Conditional mean and variance of the CIR transition; the variance is
    the noncentral chi-squared variance 2(nu + 2 lambda) scaled by c^2. */
struct MeanVarPair {
    double mean = 0.0;
    double var = 0.0;
};

inline MeanVarPair cir_mean_var(const CIRParams& p, double x, double delta) {
    if (!(x >= 0.0) || !(delta >= 0.0))
        throw std::invalid_argument("cir_mean_var: need x >= 0, delta >= 0");
    MeanVarPair mv;
    mv.mean = cir_conditional_mean(p, x, delta);
    if (delta == 0.0 || p.sigma == 0.0) return mv;
    TransitionParams tp = transition_params(p, x, delta);
    mv.var = tp.c * tp.c * (2.0 * tp.nu + 4.0 * tp.lambda_nc);
    return mv;
}

} // namespace xcir

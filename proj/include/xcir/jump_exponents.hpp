#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "xcir/cir_kernel.hpp"
#include "xcir/common.hpp"
#include "xcir/jump_model.hpp"
#include "xcir/params.hpp"
#include "xcir/rng.hpp"
#include "xcir/special_functions.hpp"

namespace xcir {

/*! Exponent pair of a jump-size law in affine form:
        E[exp(u xi) | X_pre = x] = exp(gamma0(u) + gamma1(u) x),
    both defined on the closed left half-plane with gamma(0) = 0. */
struct ExponentPair {
    std::function<Complex(Complex)> gamma0;
    std::function<Complex(Complex)> gamma1;
};

/*! Exponent pair of a built-in model. TimeChange exponents are the
    continuous CIR exponents over the inserted stretch delta:
        gamma0(u) = phi_c(delta, u),  gamma1(u) = psi_c(delta, u) - u,
    which reduces to the displayed closed forms
        gamma0(u) = -(nu/2) log(1 - 2 u c)
        gamma1(u) = u (e^{-kappa delta} / (1 - 2 u c) - 1)
    when sigma > 0. DropToGamma follows the Gamma(alpha + beta x, lambda)
    post-state law:
        gamma0(u) = -alpha log(1 - u/lambda)
        gamma1(u) = -beta  log(1 - u/lambda) - u. */
inline ExponentPair exponents(const JumpModel& model, const CIRParams& params) {
    ExponentPair pair;
    if (std::holds_alternative<NoJump>(model)) {
        pair.gamma0 = [](Complex) { return Complex{}; };
        pair.gamma1 = [](Complex) { return Complex{}; };
    } else if (const auto* g = std::get_if<DropToGamma>(&model)) {
        const double alpha = g->alpha, beta = g->beta, lambda = g->lambda;
        pair.gamma0 = [alpha, lambda](Complex u) {
            if (u == Complex{}) return Complex{};
            return -alpha * std::log(1.0 - u / lambda);
        };
        pair.gamma1 = [beta, lambda](Complex u) {
            if (u == Complex{}) return Complex{};
            return -beta * std::log(1.0 - u / lambda) - u;
        };
    } else if (const auto* tc = std::get_if<TimeChange>(&model)) {
        const CIRParams p = params;
        const double delta = tc->delta;
        pair.gamma0 = [p, delta](Complex u) {
            if (u == Complex{}) return Complex{};
            return cir_exponents(p, delta, u).phi;
        };
        pair.gamma1 = [p, delta](Complex u) {
            if (u == Complex{}) return Complex{};
            return cir_exponents(p, delta, u).psi - u;
        };
    } else {
        const auto& gt = std::get<GenericTransport>(model);
        if (!gt.has_exponents())
            throw std::runtime_error("no affine representation available");
        pair.gamma0 = gt.gamma0;
        pair.gamma1 = gt.gamma1;
    }
    return pair;
}

/*! Draw a jump size xi = F(x_pre, Z); the post-state x_pre + xi is
    non-negative by construction for the built-in models. */
inline double sample_jump(const JumpModel& model, const CIRParams& params,
                          double x_pre, Rng& rng) {
    if (!(x_pre >= 0.0)) throw std::invalid_argument("sample_jump: x_pre must be >= 0");
    if (std::holds_alternative<NoJump>(model)) return 0.0;
    if (const auto* g = std::get_if<DropToGamma>(&model)) {
        double post = rng.gamma(g->alpha + g->beta * x_pre, g->lambda);
        return post - x_pre;
    }
    if (const auto* tc = std::get_if<TimeChange>(&model)) {
        if (tc->delta == 0.0) return 0.0;
        double post = sample_cir_exact(params, x_pre, tc->delta, rng);
        return post - x_pre;
    }
    const auto& gt = std::get<GenericTransport>(model);
    double xi = gt.transport(x_pre, rng.uniform());
    if (!(x_pre + xi >= 0.0)) throw std::runtime_error("inadmissible jump sample");
    return xi;
}

// ---------------------------------------------------------------------------
// Numerical limits along the negative real axis
//
// The support infimum of a law whose log-CF is analytic on C_- is
//     inf supp = -lim_{y->inf} log phi(-y) / y,
// and the admissibility conditions read
//     lim gamma0(-y)/y <= 0,  lim gamma1(-y)/y <= 1.
// The limits converge like (a log y + b) / y; fitting that model through
// consecutive log-spaced triples removes the leading error terms.
// ---------------------------------------------------------------------------

struct LimitEstimate {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline LimitEstimate extrapolate_limit(const std::function<double(double)>& h,
                                       double y_max, int n_points,
                                       double rel_tol = 1e-6) {
    if (n_points < 4) throw std::invalid_argument("extrapolate_limit: need >= 4 points");
    if (!(y_max > 10.0)) throw std::invalid_argument("extrapolate_limit: y_max too small");

    const double y_min = y_max * 1e-6;
    const double r = std::pow(y_max / y_min, 1.0 / (n_points - 1));
    std::vector<double> ys(n_points), hs(n_points);
    for (int k = 0; k < n_points; ++k) {
        ys[k] = y_min * std::pow(r, k);
        hs[k] = h(ys[k]);
        if (!std::isfinite(hs[k]))
            throw std::runtime_error("exponent not analytic on test domain");
    }

    // fit h = L + (A log y + B)/y through each consecutive triple
    std::vector<double> limits;
    for (int k = 2; k < n_points; ++k) {
        double y1 = ys[k - 2];
        double h1 = hs[k - 2], h2 = hs[k - 1], h3 = hs[k];
        double d1 = h1 - h2, d2 = h2 - h3;
        double delta = (r * d2 - d1) * r * y1 / (r - 1.0);
        double g = (d1 * r * y1 + delta) / (r - 1.0);
        limits.push_back(h1 - g / y1);
    }

    LimitEstimate est;
    est.value = limits.back();
    est.error = std::abs(limits.back() - limits[limits.size() - 2]) +
                1e-15 * (1.0 + std::abs(limits.back()));
    double scale = 1.0 + std::abs(est.value);
    if (est.error > rel_tol * scale)
        throw std::runtime_error("limit not resolved; increase y_max");
    return est;
}

} // namespace detail

/*! Estimate inf supp F(x, Z) = -lim (gamma0(-y) + gamma1(-y) x) / y over a
    log-spaced grid up to y_max, with extrapolation and an error estimate.
    Throws "limit not resolved; increase y_max" when the tail has not
    settled. */
inline LimitEstimate support_infimum(const ExponentPair& pair, double x,
                                     double y_max = 1e8, int n_points = 25) {
    if (!(x >= 0.0)) throw std::invalid_argument("support_infimum: x must be >= 0");
    auto h = [&](double y) {
        Complex v = pair.gamma0(Complex{-y, 0.0}) + pair.gamma1(Complex{-y, 0.0}) * x;
        return -v.real() / y;
    };
    return detail::extrapolate_limit(h, y_max, n_points);
}

/*! Numerical admissibility report for an exponent pair: the two
    asymptotic limits along the negative real axis, plus a spot check of
    the exponential growth bound |exp(gamma0 + gamma1 x)| <= e^{C|w|} on a
    grid of left-half-plane points. The growth part only fits C
    empirically; it is a sanity check, not a certificate. */
struct AdmissibilityReport {
    double lim_gamma0_over_y = 0.0;
    double lim_gamma1_over_y = 0.0;
    double limit_error = 0.0;
    bool gamma0_ok = false;
    bool gamma1_ok = false;
    double growth_bound_c = 0.0; // empirical C over the spot-check grid
    bool growth_finite = false;
    bool pass = false;
};

inline std::vector<Complex> default_halfplane_grid() {
    std::vector<Complex> grid;
    for (double re : {0.0, -0.5, -2.0, -10.0})
        for (double im : {0.0, 1.0, -1.0, 10.0, -10.0}) {
            if (re == 0.0 && im == 0.0) continue;
            grid.push_back({re, im});
        }
    return grid;
}

inline AdmissibilityReport check_admissibility(
    const ExponentPair& pair, double y_max = 1e8, int n_points = 25,
    std::span<const Complex> w_grid = {}) {
    AdmissibilityReport rep;

    auto h0 = [&](double y) { return pair.gamma0(Complex{-y, 0.0}).real() / y; };
    auto h1 = [&](double y) { return pair.gamma1(Complex{-y, 0.0}).real() / y; };
    LimitEstimate l0 = detail::extrapolate_limit(h0, y_max, n_points);
    LimitEstimate l1 = detail::extrapolate_limit(h1, y_max, n_points);
    rep.lim_gamma0_over_y = l0.value;
    rep.lim_gamma1_over_y = l1.value;
    rep.limit_error = std::max(l0.error, l1.error);

    const double slack = 1e-6;
    rep.gamma0_ok = l0.value <= slack;
    rep.gamma1_ok = l1.value <= 1.0 + slack;

    std::vector<Complex> fallback;
    if (w_grid.empty()) {
        fallback = default_halfplane_grid();
        w_grid = fallback;
    }
    double c_hat = 0.0;
    bool finite = true;
    for (Complex w : w_grid) {
        for (double x : {0.0, 1.0, 5.0}) {
            Complex g0 = pair.gamma0(w), g1 = pair.gamma1(w);
            if (!is_finite(g0) || !is_finite(g1)) {
                finite = false;
                continue;
            }
            double growth = g0.real() + g1.real() * x;
            c_hat = std::max(c_hat, growth / std::abs(w));
        }
    }
    if (!finite) throw std::runtime_error("exponent not analytic on test domain");
    rep.growth_bound_c = c_hat;
    rep.growth_finite = true;
    rep.pass = rep.gamma0_ok && rep.gamma1_ok && rep.growth_finite;
    return rep;
}

// ---------------------------------------------------------------------------
// Levy-Khintchine admissibility
// ---------------------------------------------------------------------------

/*! Gamma-type Levy density  alpha exp(-lambda xi) / xi  on (0, inf):
    the Levy measure of the Gamma subordinator. */
struct GammaLevyDensity {
    double alpha = 1.0;
    double lambda = 1.0;
};

/*! Levy measure represented either as a finite atom list (weight, location)
    or a parametric Gamma-type density. */
struct LevyMeasure {
    std::vector<std::pair<double, double>> atoms; // (weight, location)
    std::optional<GammaLevyDensity> density;

    bool empty() const { return atoms.empty() && !density; }
};

/*! Drift + Levy-measure data of a conditionally infinitely divisible jump
    exponent pair, with no Gaussian part (enforced by the type):
        gamma_j(u) = u beta_j + int_0^inf (e^{u xi} - 1) nu_j(d xi). */
struct LKParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    LevyMeasure nu0, nu1;
};

struct LKReport {
    bool pass = false;
    std::vector<std::string> reasons;
    double small_jump_mass_nu0 = 0.0; // int_0^1 xi nu(dxi)
    double small_jump_mass_nu1 = 0.0;
};

namespace detail {

// int_0^1 xi nu(dxi); finite for every supported representation
inline double small_jump_mass(const LevyMeasure& m) {
    double total = 0.0;
    for (const auto& [w, loc] : m.atoms)
        if (loc <= 1.0) total += w * loc;
    if (m.density) {
        // int_0^1 alpha e^{-lambda xi} dxi
        const auto& d = *m.density;
        total += d.alpha * (-std::expm1(-d.lambda)) / d.lambda;
    }
    return total;
}

inline bool supported_on_positive_axis(const LevyMeasure& m, std::string& why) {
    for (const auto& [w, loc] : m.atoms) {
        if (w < 0.0) {
            why = "Levy measure has a negative weight";
            return false;
        }
        if (loc <= 0.0) {
            why = "Levy measure not supported on R+";
            return false;
        }
    }
    if (m.density && (!(m.density->alpha > 0.0) || !(m.density->lambda > 0.0))) {
        why = "Gamma-type density needs alpha > 0, lambda > 0";
        return false;
    }
    return true;
}

} // namespace detail

inline LKReport check_lk_admissibility(const LKParams& lk) {
    LKReport rep;
    rep.pass = true;
    if (!(lk.beta0 >= 0.0)) {
        rep.pass = false;
        rep.reasons.push_back("beta0 must be >= 0");
    }
    if (!(lk.beta1 >= -1.0)) {
        rep.pass = false;
        rep.reasons.push_back("beta1 must be >= -1");
    }
    std::string why;
    if (!detail::supported_on_positive_axis(lk.nu0, why)) {
        rep.pass = false;
        rep.reasons.push_back("nu0: " + why);
    }
    if (!detail::supported_on_positive_axis(lk.nu1, why)) {
        rep.pass = false;
        rep.reasons.push_back("nu1: " + why);
    }
    rep.small_jump_mass_nu0 = detail::small_jump_mass(lk.nu0);
    rep.small_jump_mass_nu1 = detail::small_jump_mass(lk.nu1);
    return rep;
}

/*! Evaluate beta u + int (e^{u xi} - 1) nu(dxi) for Re(u) <= 0. The
    density part goes through composite Gauss-Legendre quadrature, so the
    evaluation is independent of any closed form it may happen to have. */
inline Complex lk_exponent(double beta, const LevyMeasure& m, Complex u) {
    if (u.real() > 0.0)
        throw std::domain_error("lk_exponent: requires Re(u) <= 0");
    Complex total = beta * u;
    for (const auto& [w, loc] : m.atoms) total += w * cexpm1(u * loc);
    if (m.density) {
        const auto& d = *m.density;
        double cut = 50.0 / d.lambda;
        auto f = [&](double xi) {
            return d.alpha * cexpm1(u * xi) * std::exp(-d.lambda * xi) / xi;
        };
        total += integrate_gl(f, 0.0, cut, 16);
    }
    return total;
}

inline ExponentPair lk_exponent_pair(const LKParams& lk) {
    ExponentPair pair;
    pair.gamma0 = [lk](Complex u) { return lk_exponent(lk.beta0, lk.nu0, u); };
    pair.gamma1 = [lk](Complex u) { return lk_exponent(lk.beta1, lk.nu1, u); };
    return pair;
}

// ---------------------------------------------------------------------------
// Full convex span heuristic
// ---------------------------------------------------------------------------

/*! Bounded-grid evaluation of g(x,z) = x + F(x,z). The full-convex-span
    condition needs inf g = 0 and sup g = inf over the whole product
    space; this reports min/max over an explicit finite grid and probes
    unboundedness by re-evaluating the max on a 10x-extended state grid.
    NUMERICAL HEURISTIC: grid bounds are part of the report, nothing is
    proved. */
struct ConvexSpanReport {
    double min_g = 0.0;
    double max_g = 0.0;
    double max_g_extended = 0.0; // max over the 10x-extended state grid
    double min_x = 0.0, min_z = 0.0; // argmin
    double x_lo = 0.0, x_hi = 0.0;
    double x_hi_extended = 0.0;
    double z_lo = 0.0, z_hi = 0.0;
    bool inf_near_zero = false;
    bool sup_grows = false;
    bool spans = false;
    std::string note;
};

inline std::vector<double> default_span_x_grid() {
    return {0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0};
}

inline std::vector<double> default_span_z_grid() {
    return {1e-150, 1e-60, 1e-20, 1e-8, 1e-3, 0.05, 0.25,
            0.5,    0.75,  0.95,  0.999, 1.0 - 1e-9};
}

// quantile transport of the post-jump state for a built-in model
inline double post_state_quantile(const JumpModel& model, const CIRParams& params,
                                  double x, double z) {
    if (std::holds_alternative<NoJump>(model)) return x;
    if (const auto* g = std::get_if<DropToGamma>(&model))
        return gamma_quantile(g->alpha + g->beta * x, g->lambda, z);
    if (const auto* tc = std::get_if<TimeChange>(&model)) {
        if (tc->delta == 0.0) return x;
        if (params.sigma == 0.0) return cir_conditional_mean(params, x, tc->delta);
        TransitionParams tp = transition_params(params, x, tc->delta);
        return tp.c * noncentral_chisq_quantile(tp.nu, tp.lambda_nc, z);
    }
    const auto& gt = std::get<GenericTransport>(model);
    return x + gt.transport(x, z);
}

inline ConvexSpanReport check_full_convex_span(
    const JumpModel& model, const CIRParams& params,
    std::span<const double> x_grid = {}, std::span<const double> z_grid = {},
    double zero_tol = 1e-2) {
    std::vector<double> xd, zd;
    if (x_grid.empty()) {
        xd = default_span_x_grid();
        x_grid = xd;
    }
    if (z_grid.empty()) {
        zd = default_span_z_grid();
        z_grid = zd;
    }

    ConvexSpanReport rep;
    rep.min_g = std::numeric_limits<double>::infinity();
    rep.max_g = -std::numeric_limits<double>::infinity();
    for (double x : x_grid) {
        for (double z : z_grid) {
            double g = post_state_quantile(model, params, x, z);
            if (g < rep.min_g) {
                rep.min_g = g;
                rep.min_x = x;
                rep.min_z = z;
            }
            rep.max_g = std::max(rep.max_g, g);
        }
    }
    auto [xlo, xhi] = std::minmax_element(x_grid.begin(), x_grid.end());
    auto [zlo, zhi] = std::minmax_element(z_grid.begin(), z_grid.end());
    rep.x_lo = *xlo;
    rep.x_hi = *xhi;
    rep.z_lo = *zlo;
    rep.z_hi = *zhi;

    rep.x_hi_extended = std::max(10.0 * rep.x_hi, 10.0);
    rep.max_g_extended = rep.max_g;
    for (double z : z_grid)
        rep.max_g_extended = std::max(
            rep.max_g_extended, post_state_quantile(model, params, rep.x_hi_extended, z));

    rep.inf_near_zero = rep.min_g <= zero_tol;
    rep.sup_grows = rep.max_g_extended > rep.max_g + std::max(1.0, 0.2 * rep.max_g);
    rep.spans = rep.inf_near_zero && rep.sup_grows;
    rep.note = "numerical heuristic over the stated grid bounds; not a proof";
    return rep;
}

} // namespace xcir

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace xcir {

// ---------------------------------------------------------------------------
// Regularized incomplete gamma P(a,x), Q(a,x)
// ---------------------------------------------------------------------------

namespace detail {

// series expansion, reliable for x < a + 1
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 2000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    // prefactor in log space so that far-tail values stay representable
    double lp = a * std::log(x) - x - std::lgamma(a);
    return sum * std::exp(lp);
}

// continued fraction for Q(a,x), reliable for x >= a + 1 (modified Lentz)
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    double lp = a * std::log(x) - x - std::lgamma(a);
    return h * std::exp(lp);
}

} // namespace detail

inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x >= a + 1.0) return detail::gamma_q_cf(a, x);
    return 1.0 - detail::gamma_p_series(a, x);
}

// density of Gamma(a, 1) at x
inline double gamma_pdf_unit(double a, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
}

// ---------------------------------------------------------------------------
// Inverse standard normal CDF (Acklam's rational approximation + one
// Halley refinement; ~1e-15 absolute accuracy)
// ---------------------------------------------------------------------------

inline double norm_ppf(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("norm_ppf: p must lie in (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step against erfc for full double accuracy
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

// ---------------------------------------------------------------------------
// Gamma quantile (unit rate): smallest x with P(a,x) = p
// ---------------------------------------------------------------------------

inline double gamma_quantile_unit(double a, double p) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_quantile_unit: a > 0 required");
    if (!(p >= 0.0) || !(p < 1.0))
        throw std::invalid_argument("gamma_quantile_unit: p must lie in [0,1)");
    if (p == 0.0) return 0.0;

    // starting guess: left-tail power law or Wilson-Hilferty
    double x;
    double lcut = std::log(p) + std::lgamma(a + 1.0);
    if (lcut / a < -2.0) {
        x = std::exp(lcut / a);
    } else {
        double z = norm_ppf(p);
        double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
        x = a * t * t * t;
        if (!(x > 0.0)) x = std::exp(lcut / a);
    }
    if (!(x > 0.0) || !std::isfinite(x)) x = a;

    // bracket the root, then Newton with bisection fallback
    double lo = 0.0, hi = std::max(x * 4.0, a + 20.0 * std::sqrt(a) + 20.0);
    while (gamma_p(a, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("gamma_quantile_unit: bracket failed");
    }
    if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

    for (int it = 0; it < 200; ++it) {
        double f = gamma_p(a, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        double pdf = gamma_pdf_unit(a, x);
        double step = (pdf > 0.0) ? f / pdf : 0.0;
        double xn = x - step;
        if (!(xn > lo) || !(xn < hi) || pdf == 0.0) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(xn))) { x = xn; break; }
        x = xn;
    }
    return x;
}

// quantile of Gamma(shape, rate)
inline double gamma_quantile(double shape, double rate, double p) {
    if (!(rate > 0.0)) throw std::invalid_argument("gamma_quantile: rate > 0 required");
    return gamma_quantile_unit(shape, p) / rate;
}

// ---------------------------------------------------------------------------
// Noncentral chi-squared CDF / quantile
//
// F(x; nu, lambda) = sum_k Poisson(lambda/2)_k * P(nu/2 + k, x/2),
// summed outward from the modal Poisson index.
// ---------------------------------------------------------------------------

inline double noncentral_chisq_cdf(double nu, double lambda, double x) {
    if (!(nu >= 0.0) || !(lambda >= 0.0))
        throw std::invalid_argument("noncentral_chisq_cdf: need nu >= 0, lambda >= 0");
    if (!(x >= 0.0)) return 0.0;
    const double y = 0.5 * x;
    const double half_l = 0.5 * lambda;

    auto component_cdf = [&](double shape) {
        // shape == 0 is the unit mass at the origin
        if (shape == 0.0) return 1.0;
        return gamma_p(shape, y);
    };

    if (half_l == 0.0) return component_cdf(0.5 * nu);

    // start at the modal Poisson term
    const long k0 = static_cast<long>(std::floor(half_l));
    double lw0 = -half_l + k0 * std::log(half_l) - std::lgamma(static_cast<double>(k0) + 1.0);
    double w0 = std::exp(lw0);

    double a0 = 0.5 * nu + static_cast<double>(k0);
    double p0 = component_cdf(a0);
    // t_k = y^a e^{-y} / Gamma(a+1) links successive gamma CDFs:
    // P(a+1, y) = P(a, y) - t(a)
    auto t_of = [&](double a) {
        if (y == 0.0) return 0.0;
        return std::exp(a * std::log(y) - y - std::lgamma(a + 1.0));
    };

    double total = w0 * p0;
    double wsum = w0;

    // upward from k0+1
    {
        double w = w0, pk = p0, tk = t_of(a0);
        for (long k = k0 + 1; k <= k0 + 100000; ++k) {
            w *= half_l / static_cast<double>(k);
            pk -= tk;
            if (pk < 0.0) pk = 0.0;
            tk *= y / (a0 + static_cast<double>(k - k0));
            total += w * pk;
            wsum += w;
            if (w * pk < 1e-18 * (total + 1e-300) && wsum > 1.0 - 1e-16) break;
            if (w < 1e-18 && k > k0 + 4) break;
        }
    }
    // downward from k0-1
    {
        double w = w0, pk = p0;
        for (long k = k0 - 1; k >= 0; --k) {
            w *= static_cast<double>(k + 1) / half_l;
            double a = 0.5 * nu + static_cast<double>(k);
            pk += t_of(a);
            if (pk > 1.0) pk = 1.0;
            double contrib = w * ((a == 0.0) ? 1.0 : pk);
            total += contrib;
            wsum += w;
            if (w < 1e-18 && (k0 - k) > 4) break;
        }
    }
    if (total < 0.0) total = 0.0;
    if (total > 1.0) total = 1.0;
    return total;
}

inline double noncentral_chisq_quantile(double nu, double lambda, double p) {
    if (!(p >= 0.0) || !(p < 1.0))
        throw std::invalid_argument("noncentral_chisq_quantile: p must lie in [0,1)");
    if (p == 0.0) return 0.0;
    double mean = nu + lambda;
    double sd = std::sqrt(2.0 * nu + 4.0 * lambda);
    double hi = mean + 20.0 * sd + 20.0;
    while (noncentral_chisq_cdf(nu, lambda, hi) < p) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("noncentral_chisq_quantile: bracket failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (noncentral_chisq_cdf(nu, lambda, mid) < p) lo = mid; else hi = mid;
        if (hi - lo <= 1e-13 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

namespace detail {

struct GaussLegendre {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        // Newton iteration on Legendre polynomials
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[n - 1 - i] = weights[i];
        }
    }
};

inline const GaussLegendre& gl64() {
    static const GaussLegendre table(64);
    return table;
}

} // namespace detail

// composite 64-point Gauss-Legendre on [a,b]
template <typename F>
auto integrate_gl(F&& f, double a, double b, int panels = 1)
    -> decltype(f(0.0)) {
    const auto& gl = detail::gl64();
    using R = decltype(f(0.0));
    R total{};
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        double mid = lo + 0.5 * h;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            total += R(gl.weights[i] * 0.5 * h) * f(mid + 0.5 * h * gl.nodes[i]);
        }
    }
    return total;
}

} // namespace xcir

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "xcir/common.hpp"

namespace xcir {

// Welford running mean/variance
struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const {
        return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

struct ComplexMeanVar {
    MeanVar re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    Complex mean() const { return {re.mean, im.mean}; }
};

// z-score with the exact-agreement convention for zero-variance estimators
inline double z_score(double estimate, double target, double std_error) {
    double diff = estimate - target;
    if (std_error == 0.0)
        return std::abs(diff) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std_error;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

// survival function of the Kolmogorov distribution
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 0.18) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 101; ++k) {
        double term = std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// one-sample statistic against a CDF; data need not be sorted
inline double ks_statistic(std::vector<double> data,
                           const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(data.begin(), data.end());
    double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double f = cdf(data[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

inline double ks_pvalue(double d, double n_effective) {
    double rn = std::sqrt(n_effective);
    return kolmogorov_q(d * (rn + 0.12 + 0.11 / rn));
}

inline double ks_pvalue_one_sample(double d, std::size_t n) {
    return ks_pvalue(d, static_cast<double>(n));
}

// two-sample statistic; inputs copied and sorted internally
inline double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_statistic_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

inline double ks_pvalue_two_sample(double d, std::size_t n, std::size_t m) {
    double ne = static_cast<double>(n) * static_cast<double>(m) /
                static_cast<double>(n + m);
    return ks_pvalue(d, ne);
}

// ---------------------------------------------------------------------------
// Covariance with jackknife standard error
// ---------------------------------------------------------------------------

struct CovEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> leave_one_out; // one covariance estimate per left-out path
};

inline CovEstimate jackknife_covariance(std::span<const double> x,
                                        std::span<const double> y) {
    std::size_t n = x.size();
    if (n != y.size() || n < 3)
        throw std::invalid_argument("jackknife_covariance: need matched samples, n >= 3");
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
    }
    double nn = static_cast<double>(n);
    CovEstimate out;
    out.value = (sxy - sx * sy / nn) / (nn - 1.0);
    out.leave_one_out.resize(n);
    double loo_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sxi = sx - x[i], syi = sy - y[i], sxyi = sxy - x[i] * y[i];
        double ci = (sxyi - sxi * syi / (nn - 1.0)) / (nn - 2.0);
        out.leave_one_out[i] = ci;
        loo_mean += ci;
    }
    loo_mean /= nn;
    double ss = 0.0;
    for (double ci : out.leave_one_out) ss += (ci - loo_mean) * (ci - loo_mean);
    out.std_error = std::sqrt((nn - 1.0) / nn * ss);
    return out;
}

} // namespace xcir

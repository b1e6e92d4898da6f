#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xcir/affine_engine.hpp"
#include "xcir/io.hpp"
#include "xcir/jump_exponents.hpp"
#include "xcir/path_simulator.hpp"
#include "xcir/scenario.hpp"
#include "xcir/special_functions.hpp"
#include "xcir/stats.hpp"

namespace xcir {

// ---------------------------------------------------------------------------
// Characteristic-function comparison: Monte Carlo vs analytic exponents
// ---------------------------------------------------------------------------

struct CFRow {
    Complex u;
    Complex analytic;
    Complex mc;
    double se_re = 0.0, se_im = 0.0;
    double z_re = 0.0, z_im = 0.0;
};

struct CFComparisonReport {
    std::vector<CFRow> rows;
    double max_abs_z = 0.0;
    bool pass = false;        // max component |z| <= 4 across the grid
    double threshold = 4.0;   // statistical bound with multiple-testing slack
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::int64_t n_paths = 0;
    double horizon = 0.0;
};

/*! Compare the analytic characteristic function exp(phi + psi x0) with a
    Monte Carlo estimate over exact terminal draws, per u-grid point.
    Standard errors are per real/imaginary component. */
inline CFComparisonReport compare_affine(const ScenarioConfig& cfg, double T,
                                         std::span<const Complex> u_grid,
                                         std::int64_t n_paths, std::uint64_t seed,
                                         int n_threads = 1) {
    CFComparisonReport rep;
    rep.seed = seed;
    rep.config_hash = config_hash(cfg);
    rep.n_paths = n_paths;
    rep.horizon = T;

    std::vector<double> draws = simulate_terminal_batch(cfg, T, n_paths, seed, n_threads);

    for (Complex u : u_grid) {
        CFRow row;
        row.u = u;
        row.analytic = char_fn(cfg.params, cfg.schedule, 0.0, T, u, cfg.params.x0);
        ComplexMeanVar acc;
        for (double x : draws) acc.add(std::exp(u * x));
        row.mc = acc.mean();
        row.se_re = acc.re.std_error();
        row.se_im = acc.im.std_error();
        row.z_re = z_score(row.mc.real(), row.analytic.real(), row.se_re);
        row.z_im = z_score(row.mc.imag(), row.analytic.imag(), row.se_im);
        rep.max_abs_z = std::max({rep.max_abs_z, std::abs(row.z_re), std::abs(row.z_im)});
        rep.rows.push_back(row);
    }
    rep.pass = rep.max_abs_z <= rep.threshold;
    return rep;
}

// ---------------------------------------------------------------------------
// Stationary asymptotics of the time-change jump
// ---------------------------------------------------------------------------

struct StationaryRow {
    Complex u;
    double x = 0.0;
    Complex post_jump_cf; // exp(gamma0 + gamma1 x + u x)
    Complex gamma_cf;     // (1 - u sigma^2 / (2 kappa))^{-nu/2}
    double abs_dev = 0.0;
};

struct StationaryReport {
    double delta = 0.0;
    std::vector<StationaryRow> rows;
    double max_abs_dev = 0.0;
};

/*! Check that the post-jump law of TimeChange(delta) approaches the CIR
    stationary distribution Gamma(2 kappa theta / sigma^2, 2 kappa / sigma^2)
    for large delta. */
inline StationaryReport stationary_limit_check(const CIRParams& params, double delta,
                                               std::span<const Complex> u_grid,
                                               std::span<const double> x_grid) {
    if (!(params.kappa > 0.0) || !(params.sigma > 0.0))
        throw std::domain_error("stationary_limit_check: requires kappa > 0, sigma > 0");
    StationaryReport rep;
    rep.delta = delta;
    ExponentPair pair = exponents(TimeChange{delta}, params);
    double nu = 4.0 * params.kappa * params.theta / (params.sigma * params.sigma);
    for (Complex u : u_grid) {
        Complex gamma_cf = std::exp(
            -0.5 * nu *
            std::log(1.0 - u * (params.sigma * params.sigma) / (2.0 * params.kappa)));
        for (double x : x_grid) {
            StationaryRow row;
            row.u = u;
            row.x = x;
            row.post_jump_cf = std::exp(pair.gamma0(u) + pair.gamma1(u) * x + u * x);
            row.gamma_cf = gamma_cf;
            row.abs_dev = std::abs(row.post_jump_cf - row.gamma_cf);
            rep.max_abs_dev = std::max(rep.max_abs_dev, row.abs_dev);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Compensator identity
// ---------------------------------------------------------------------------

struct CompensatorTestFn {
    std::string name;
    std::function<double(double t, double z)> h;
};

struct CompensatorRow {
    std::string name;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double quadrature = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct CompensatorReport {
    std::vector<CompensatorRow> rows;
    bool pass = false;
    std::uint64_t seed = 0;
    std::int64_t n_samples = 0;
};

/*! Verify E[sum_n H(s_n, Z_n)] = sum_n int_0^1 H(s_n, z) dz for each test
    function: left side by Monte Carlo over the uniforms, right side by
    Gauss-Legendre quadrature; pass within 3 standard errors. */
inline CompensatorReport compensator_check(const JumpSchedule& schedule,
                                           std::span<const CompensatorTestFn> tests,
                                           std::int64_t n_samples, std::uint64_t seed) {
    CompensatorReport rep;
    rep.seed = seed;
    rep.n_samples = n_samples;
    rep.pass = true;
    Rng rng(seed);

    std::vector<MeanVar> acc(tests.size());
    for (std::int64_t i = 0; i < n_samples; ++i) {
        std::vector<double> z(schedule.entries.size());
        for (auto& zj : z) zj = rng.uniform();
        for (std::size_t f = 0; f < tests.size(); ++f) {
            double total = 0.0;
            for (std::size_t j = 0; j < schedule.entries.size(); ++j)
                total += tests[f].h(schedule.entries[j].time, z[j]);
            acc[f].add(total);
        }
    }
    for (std::size_t f = 0; f < tests.size(); ++f) {
        CompensatorRow row;
        row.name = tests[f].name;
        row.mc_mean = acc[f].mean;
        row.mc_se = acc[f].std_error();
        row.quadrature = 0.0;
        for (const auto& e : schedule.entries) {
            double s = e.time;
            row.quadrature +=
                integrate_gl([&](double z) { return tests[f].h(s, z); }, 0.0, 1.0, 1);
        }
        row.z = z_score(row.mc_mean, row.quadrature, row.mc_se);
        row.pass = std::abs(row.z) <= 3.0;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

inline std::vector<CompensatorTestFn> default_compensator_tests(const JumpSchedule& schedule) {
    double cutoff = schedule.entries.empty()
                        ? 0.0
                        : schedule.entries[std::min<std::size_t>(4, schedule.entries.size() - 1)].time;
    return {
        {"constant_one", [](double, double) { return 1.0; }},
        {"identity_in_z", [](double, double z) { return z; }},
        {"exp_z_before_s5", [cutoff](double t, double z) {
             return t <= cutoff ? std::exp(z) : 0.0;
         }},
    };
}

// ---------------------------------------------------------------------------
// Report serialization (machine JSON + aligned text)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json complex_json(Complex z) {
    return {{"re", z.real()}, {"im", z.imag()}};
}

inline nlohmann::ordered_json to_json(const CFComparisonReport& rep) {
    nlohmann::ordered_json j;
    j["check"] = "characteristic_function";
    j["seed"] = rep.seed;
    j["config_hash"] = rep.config_hash;
    j["n_paths"] = rep.n_paths;
    j["horizon"] = rep.horizon;
    j["threshold"] = rep.threshold;
    j["max_abs_z"] = rep.max_abs_z;
    j["pass"] = rep.pass;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"u", complex_json(r.u)},
                        {"analytic", complex_json(r.analytic)},
                        {"mc", complex_json(r.mc)},
                        {"se_re", r.se_re},
                        {"se_im", r.se_im},
                        {"z_re", r.z_re},
                        {"z_im", r.z_im}});
    }
    j["rows"] = rows;
    return j;
}

inline std::string to_text(const CFComparisonReport& rep) {
    std::ostringstream os;
    os << "characteristic-function comparison  (seed " << rep.seed << ", "
       << rep.n_paths << " paths, config " << std::hex << rep.config_hash << std::dec
       << ")\n";
    os << std::setw(18) << "u" << std::setw(24) << "analytic" << std::setw(24) << "mc"
       << std::setw(10) << "|z_re|" << std::setw(10) << "|z_im|" << '\n';
    os << std::fixed << std::setprecision(6);
    for (const auto& r : rep.rows) {
        std::ostringstream us, as, ms;
        us << r.u.real() << (r.u.imag() < 0 ? "" : "+") << r.u.imag() << "i";
        as << std::fixed << std::setprecision(6) << r.analytic.real()
           << (r.analytic.imag() < 0 ? "" : "+") << r.analytic.imag() << "i";
        ms << std::fixed << std::setprecision(6) << r.mc.real()
           << (r.mc.imag() < 0 ? "" : "+") << r.mc.imag() << "i";
        os << std::setw(18) << us.str() << std::setw(24) << as.str() << std::setw(24)
           << ms.str() << std::setw(10) << std::abs(r.z_re) << std::setw(10)
           << std::abs(r.z_im) << '\n';
    }
    os << "max |z| = " << rep.max_abs_z << "  threshold " << rep.threshold << "  -> "
       << (rep.pass ? "pass" : "FAIL") << '\n';
    return os.str();
}

inline nlohmann::ordered_json to_json(const StationaryReport& rep) {
    nlohmann::ordered_json j;
    j["check"] = "stationary_limit";
    j["delta"] = rep.delta;
    j["max_abs_dev"] = rep.max_abs_dev;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"u", complex_json(r.u)},
                        {"x", r.x},
                        {"post_jump_cf", complex_json(r.post_jump_cf)},
                        {"gamma_cf", complex_json(r.gamma_cf)},
                        {"abs_dev", r.abs_dev}});
    }
    j["rows"] = rows;
    return j;
}

inline nlohmann::ordered_json to_json(const CompensatorReport& rep) {
    nlohmann::ordered_json j;
    j["check"] = "compensator_identity";
    j["seed"] = rep.seed;
    j["n_samples"] = rep.n_samples;
    j["pass"] = rep.pass;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"name", r.name},
                        {"mc_mean", r.mc_mean},
                        {"mc_se", r.mc_se},
                        {"quadrature", r.quadrature},
                        {"z", r.z},
                        {"pass", r.pass}});
    }
    j["rows"] = rows;
    return j;
}

inline std::string to_text(const CompensatorReport& rep) {
    std::ostringstream os;
    os << "compensator identity  (seed " << rep.seed << ", " << rep.n_samples
       << " samples)\n";
    os << std::setw(20) << "test" << std::setw(14) << "mc" << std::setw(14) << "quad"
       << std::setw(10) << "|z|" << std::setw(8) << "pass" << '\n';
    os << std::fixed << std::setprecision(6);
    for (const auto& r : rep.rows) {
        os << std::setw(20) << r.name << std::setw(14) << r.mc_mean << std::setw(14)
           << r.quadrature << std::setw(10) << std::abs(r.z) << std::setw(8)
           << (r.pass ? "yes" : "NO") << '\n';
    }
    return os.str();
}

} // namespace xcir

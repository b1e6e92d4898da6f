#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "xcir/cir_kernel.hpp"
#include "xcir/jump_exponents.hpp"
#include "xcir/jump_model.hpp"
#include "xcir/params.hpp"
#include "xcir/rng.hpp"
#include "xcir/scenario.hpp"
#include "xcir/stats.hpp"

namespace xcir {

struct JumpRecord {
    std::size_t n = 0; // 1-based jump index
    double time = 0.0;
    double x_pre = 0.0;
    double xi = 0.0;
    double x_post = 0.0;
};

/*! One simulated path, stored right-continuous: the grid value at a jump
    time is the post-jump state; the pre-jump value lives in the jump
    record. */
struct SimulatedPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<JumpRecord> jumps;
};

/*! Piecewise-exact path construction: exact CIR transitions between grid
    points, jump draws at the scheduled dates. */
inline SimulatedPath simulate_path(const ScenarioConfig& cfg, Rng& rng) {
    SimulatedPath path;
    path.times = cfg.grid;
    path.values.resize(cfg.grid.size());

    // jump lookup keyed by grid position (jump times are grid points)
    std::vector<std::ptrdiff_t> jump_at(cfg.grid.size(), -1);
    for (std::size_t j = 0; j < cfg.schedule.entries.size(); ++j) {
        double s = cfg.schedule.entries[j].time;
        if (s > cfg.horizon) continue;
        auto it = std::lower_bound(cfg.grid.begin(), cfg.grid.end(), s);
        if (it == cfg.grid.end() || *it != s)
            throw std::logic_error("simulate_path: jump time missing from grid");
        jump_at[static_cast<std::size_t>(it - cfg.grid.begin())] =
            static_cast<std::ptrdiff_t>(j);
    }

    double x = cfg.params.x0;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (i > 0) x = sample_cir_exact(cfg.params, x, cfg.grid[i] - cfg.grid[i - 1], rng);
        if (jump_at[i] >= 0) {
            const auto& entry = cfg.schedule.entries[static_cast<std::size_t>(jump_at[i])];
            JumpRecord rec;
            rec.n = static_cast<std::size_t>(jump_at[i]) + 1;
            rec.time = entry.time;
            rec.x_pre = x;
            rec.xi = sample_jump(entry.model, cfg.params, x, rng);
            x = rec.x_pre + rec.xi;
            rec.x_post = x;
            path.jumps.push_back(rec);
        }
        path.values[i] = x;
    }
    return path;
}

/*! Exact draw of X_T without a time grid: sequential exact transitions
    jump-to-jump, then to T. A jump exactly at T is applied (the terminal
    value is the post-jump state). */
inline double simulate_terminal(const CIRParams& params, const JumpSchedule& schedule,
                                double T, Rng& rng) {
    if (!(T >= 0.0)) throw std::invalid_argument("simulate_terminal: T must be >= 0");
    double x = params.x0;
    double t = 0.0;
    for (const auto& entry : schedule.entries) {
        if (entry.time > T) break;
        x = sample_cir_exact(params, x, entry.time - t, rng);
        x += sample_jump(entry.model, params, x, rng);
        t = entry.time;
    }
    return sample_cir_exact(params, x, T - t, rng);
}

inline double simulate_terminal(const ScenarioConfig& cfg, double T, Rng& rng) {
    return simulate_terminal(cfg.params, cfg.schedule, T, rng);
}

/*! Dual construction for all-TimeChange schedules: run the continuous
    CIR on the shifted clock tau(T) = T + sum of deltas, by sequential
    exact transitions through the clock breakpoints. Distributionally
    equal to simulate_terminal on the same scenario. */
inline double simulate_time_changed(const CIRParams& params, const JumpSchedule& schedule,
                                    double T, Rng& rng) {
    if (!(T >= 0.0)) throw std::invalid_argument("simulate_time_changed: T must be >= 0");
    double y = params.x0;
    double clock = 0.0; // position on the underlying CIR clock
    double shift = 0.0; // accumulated time-change shift
    for (const auto& entry : schedule.entries) {
        const auto* tc = std::get_if<TimeChange>(&entry.model);
        if (!tc)
            throw std::invalid_argument("dual construction requires time-change jumps");
        if (entry.time > T) continue;
        double pre_clock = entry.time + shift;
        y = sample_cir_exact(params, y, pre_clock - clock, rng);
        y = sample_cir_exact(params, y, tc->delta, rng);
        shift += tc->delta;
        clock = pre_clock + tc->delta;
    }
    return sample_cir_exact(params, y, T + shift - clock, rng);
}

// ---------------------------------------------------------------------------
// Parallel Monte Carlo batches
//
// Work is split into chunks of cfg.mc.chunk_size paths; chunk k draws
// from Rng::stream(master_seed, k), and results land in preassigned
// slots, so output is bit-reproducible for any thread count.
// ---------------------------------------------------------------------------

template <typename Fn>
inline void run_chunked(std::int64_t n_paths, std::int64_t chunk_size,
                        int n_threads, Fn&& body) {
    if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    if (chunk_size <= 0) chunk_size = n_paths;
    std::int64_t n_chunks = (n_paths + chunk_size - 1) / chunk_size;
    auto run_chunk = [&](std::int64_t k) {
        std::int64_t begin = k * chunk_size;
        std::int64_t end = std::min(begin + chunk_size, n_paths);
        body(k, begin, end);
    };
    if (n_threads <= 1 || n_chunks == 1) {
        for (std::int64_t k = 0; k < n_chunks; ++k) run_chunk(k);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t k = next.fetch_add(1); k < n_chunks; k = next.fetch_add(1))
            run_chunk(k);
    };
    std::vector<std::thread> pool;
    int workers = std::min<std::int64_t>(n_threads, n_chunks);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline std::vector<double> simulate_terminal_batch(const ScenarioConfig& cfg, double T,
                                                   std::int64_t n_paths,
                                                   std::uint64_t master_seed,
                                                   int n_threads = 1) {
    std::vector<double> out(static_cast<std::size_t>(n_paths));
    run_chunked(n_paths, cfg.mc.chunk_size, n_threads,
                [&](std::int64_t k, std::int64_t begin, std::int64_t end) {
                    Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(k));
                    for (std::int64_t i = begin; i < end; ++i)
                        out[static_cast<std::size_t>(i)] = simulate_terminal(cfg, T, rng);
                });
    return out;
}

// ---------------------------------------------------------------------------
// Jump covariance
// ---------------------------------------------------------------------------

/*! Per-path jump samples (x_pre, xi) for jumps 1..max_index, simulated
    without a grid. Used by the covariance estimators and their oracles. */
struct JumpSampleSet {
    std::size_t max_index = 0;
    std::vector<std::vector<double>> x_pre; // [jump][path]
    std::vector<std::vector<double>> xi;    // [jump][path]
};

inline JumpSampleSet collect_jump_samples(const CIRParams& params,
                                          const JumpSchedule& schedule,
                                          std::size_t max_index, std::int64_t n_paths,
                                          Rng& rng) {
    if (max_index == 0 || max_index > schedule.entries.size())
        throw std::invalid_argument("collect_jump_samples: jump index out of range");
    JumpSampleSet set;
    set.max_index = max_index;
    set.x_pre.assign(max_index, {});
    set.xi.assign(max_index, {});
    for (auto& v : set.x_pre) v.reserve(static_cast<std::size_t>(n_paths));
    for (auto& v : set.xi) v.reserve(static_cast<std::size_t>(n_paths));
    for (std::int64_t p = 0; p < n_paths; ++p) {
        double x = params.x0;
        double t = 0.0;
        for (std::size_t j = 0; j < max_index; ++j) {
            const auto& entry = schedule.entries[j];
            x = sample_cir_exact(params, x, entry.time - t, rng);
            double xi = sample_jump(entry.model, params, x, rng);
            set.x_pre[j].push_back(x);
            set.xi[j].push_back(xi);
            x += xi;
            t = entry.time;
        }
    }
    return set;
}

/*! Monte Carlo estimate of c(n,m) = Cov(xi_n, xi_m) with jackknife
    standard error; n, m are 1-based jump indices. */
inline CovEstimate jump_covariance_mc(const ScenarioConfig& cfg, std::size_t n,
                                      std::size_t m, std::int64_t n_paths, Rng& rng) {
    std::size_t hi = std::max(n, m);
    if (n == 0 || m == 0 || hi > cfg.schedule.entries.size())
        throw std::invalid_argument("jump_covariance_mc: jump index out of range");
    JumpSampleSet set = collect_jump_samples(cfg.params, cfg.schedule, hi, n_paths, rng);
    return jackknife_covariance(set.xi[n - 1], set.xi[m - 1]);
}

/*! Closed-form covariance of time-change jump sizes. With
    t_n = s_n + H(s_n) - Delta_n on the underlying clock and
    Cov(Y_a, Y_b) = e^{-kappa (b-a)} Var(Y_a) for a <= b,

      c(n,m) = Cov(Y_{t_n+D_n} - Y_{t_n}, Y_{t_m+D_m} - Y_{t_m})

    expands into four damped variance terms. Var(Y_a) is the CIR
    conditional variance from the deterministic start x0. */
inline double jump_covariance_analytic_tc(const CIRParams& params,
                                          const JumpSchedule& schedule, std::size_t n,
                                          std::size_t m) {
    if (!(params.kappa > 0.0))
        throw std::domain_error("analytic covariance requires kappa > 0");
    std::size_t hi = std::max(n, m);
    if (n == 0 || m == 0 || hi > schedule.entries.size())
        throw std::invalid_argument("jump_covariance_analytic_tc: jump index out of range");

    std::vector<double> t(hi), d(hi);
    double shift = 0.0;
    for (std::size_t j = 0; j < hi; ++j) {
        const auto* tc = std::get_if<TimeChange>(&schedule.entries[j].model);
        if (!tc)
            throw std::invalid_argument("dual construction requires time-change jumps");
        t[j] = schedule.entries[j].time + shift;
        d[j] = tc->delta;
        shift += tc->delta;
    }

    auto var_at = [&](double a) { return cir_mean_var(params, params.x0, a).var; };
    auto cov_y = [&](double a, double b) {
        if (a > b) std::swap(a, b);
        return std::exp(-params.kappa * (b - a)) * var_at(a);
    };

    double tn = t[n - 1], an = tn + d[n - 1];
    double tm = t[m - 1], am = tm + d[m - 1];
    return cov_y(an, am) - cov_y(an, tm) - cov_y(tn, am) + cov_y(tn, tm);
}

} // namespace xcir

// xcir command-line front end: scenario ingestion, simulation, exponent
// evaluation, validation suites, CSV/JSON emission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xcir/xcir.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", opts.seed_override,
                    "seed override; replaces the config seed");
    cmd->add_option("--threads", opts.threads, "worker thread cap")
        ->check(CLI::PositiveNumber);
}

// Seed priority: --seed flag, then config, then XCIR_SEED, then 0.
std::pair<std::uint64_t, std::string> resolve_seed(const CommonOpts& opts,
                                                   const xcir::ScenarioConfig& cfg) {
    if (opts.seed_override) return {*opts.seed_override, "flag"};
    if (cfg.mc.seed) return {*cfg.mc.seed, "config"};
    if (const char* env = std::getenv("XCIR_SEED")) {
        try {
            return {std::stoull(env), "env"};
        } catch (const std::exception&) {
            throw std::invalid_argument("XCIR_SEED is not a valid integer");
        }
    }
    return {0, "default"};
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

ordered_json run_header(const xcir::ScenarioConfig& cfg, std::uint64_t seed,
                        const std::string& seed_source) {
    ordered_json j;
    j["seed"] = seed;
    j["seed_source"] = seed_source;
    j["config_hash"] = xcir::config_hash(cfg);
    j["feller"] = cfg.params.feller();
    if (!cfg.warnings.empty()) j["warnings"] = cfg.warnings;
    return j;
}

void print_warnings(const xcir::ScenarioConfig& cfg) {
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOpts& opts, std::optional<std::int64_t> paths_override,
                 bool per_path) {
    xcir::ScenarioConfig cfg = xcir::load_scenario(opts.config_path);
    print_warnings(cfg);
    auto [seed, seed_source] = resolve_seed(opts, cfg);
    std::int64_t n_paths = paths_override.value_or(cfg.mc.n_paths);
    if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");

    fs::create_directories(opts.out_dir);

    std::vector<xcir::SimulatedPath> paths(static_cast<std::size_t>(n_paths));
    xcir::run_chunked(n_paths, cfg.mc.chunk_size, opts.threads,
                      [&](std::int64_t k, std::int64_t begin, std::int64_t end) {
                          xcir::Rng rng = xcir::Rng::stream(seed, static_cast<std::uint64_t>(k));
                          for (std::int64_t i = begin; i < end; ++i)
                              paths[static_cast<std::size_t>(i)] = xcir::simulate_path(cfg, rng);
                      });

    std::vector<std::string> files;
    if (per_path) {
        for (std::size_t p = 0; p < paths.size(); ++p) {
            char name[64];
            std::snprintf(name, sizeof(name), "path_%05zu.csv", p);
            std::ofstream os(fs::path(opts.out_dir) / name, std::ios::binary);
            xcir::write_path_csv(os, paths[p]);
            files.push_back(name);
            std::snprintf(name, sizeof(name), "jumps_%05zu.csv", p);
            std::ofstream js(fs::path(opts.out_dir) / name, std::ios::binary);
            xcir::write_jumps_csv(js, paths[p]);
            files.push_back(name);
        }
    } else {
        {
            std::ofstream os(fs::path(opts.out_dir) / "paths.csv", std::ios::binary);
            xcir::write_paths_long_csv(os, paths);
        }
        {
            std::ofstream js(fs::path(opts.out_dir) / "jumps.csv", std::ios::binary);
            xcir::write_jumps_long_csv(js, paths);
        }
        files = {"paths.csv", "jumps.csv"};
    }

    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin, vsum = 0.0;
    std::size_t n_values = 0, n_jumps = 0;
    for (const auto& path : paths) {
        for (double v : path.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            vsum += v;
            ++n_values;
        }
        n_jumps += path.jumps.size();
    }

    ordered_json summary = run_header(cfg, seed, seed_source);
    summary["n_paths"] = n_paths;
    summary["grid_points"] = cfg.grid.size();
    summary["jumps_per_path"] = paths.empty() ? 0 : paths[0].jumps.size();
    summary["total_jumps"] = n_jumps;
    summary["min"] = vmin;
    summary["max"] = vmax;
    summary["mean"] = vsum / static_cast<double>(n_values);
    summary["files"] = files;
    write_json_file(fs::path(opts.out_dir) / "simulate_summary.json", summary);

    std::cout << "simulated " << n_paths << " path(s), " << cfg.grid.size()
              << " grid points, " << summary["jumps_per_path"] << " jumps per path\n"
              << "value range [" << vmin << ", " << vmax << "], mean "
              << summary["mean"].get<double>() << "\n"
              << "seed " << seed << " (" << seed_source << "), feller="
              << (cfg.params.feller() ? "true" : "false") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

xcir::Complex parse_u(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

int cmd_exponents(const CommonOpts& opts, double t, std::optional<double> T_opt,
                  const std::vector<std::string>& u_args, bool trace) {
    xcir::ScenarioConfig cfg = xcir::load_scenario(opts.config_path);
    print_warnings(cfg);
    double T = T_opt.value_or(cfg.horizon);

    std::vector<xcir::Complex> us;
    for (const auto& s : u_args) us.push_back(parse_u(s));
    if (us.empty()) us = cfg.u_grid;
    if (us.empty()) throw std::invalid_argument("no u values: pass --u or set u_grid");

    fs::create_directories(opts.out_dir);
    ordered_json out;
    out["t"] = t;
    out["T"] = T;
    out["x0"] = cfg.params.x0;
    auto rows = ordered_json::array();

    std::cout << "  u (re, im)            phi                      psi                      CF(x0)\n";
    for (xcir::Complex u : us) {
        xcir::AffineExponents e = xcir::extended_exponents(cfg.params, cfg.schedule, t, T, u);
        xcir::Complex cf = std::exp(e.phi + e.psi * cfg.params.x0);
        ordered_json row;
        row["u"] = xcir::complex_json(u);
        row["phi"] = xcir::complex_json(e.phi);
        row["psi"] = xcir::complex_json(e.psi);
        row["cf_at_x0"] = xcir::complex_json(cf);
        if (trace) {
            auto tr = ordered_json::array();
            for (const auto& b : e.trace) {
                tr.push_back({{"jump", b.jump_index},
                              {"time", b.time},
                              {"phi_right", xcir::complex_json(b.phi_right)},
                              {"psi_right", xcir::complex_json(b.psi_right)},
                              {"phi_left", xcir::complex_json(b.phi_left)},
                              {"psi_left", xcir::complex_json(b.psi_left)}});
            }
            row["trace"] = tr;
        }
        rows.push_back(row);
        std::printf("  (%g, %g)\t(%.12g, %.12g)\t(%.12g, %.12g)\t(%.12g, %.12g)\n",
                    u.real(), u.imag(), e.phi.real(), e.phi.imag(), e.psi.real(),
                    e.psi.imag(), cf.real(), cf.imag());
        if (trace) {
            for (const auto& b : e.trace)
                std::printf("    jump %zu at t=%g: right=(%.9g,%.9g | %.9g,%.9g) left=(%.9g,%.9g | %.9g,%.9g)\n",
                            b.jump_index, b.time, b.phi_right.real(), b.phi_right.imag(),
                            b.psi_right.real(), b.psi_right.imag(), b.phi_left.real(),
                            b.phi_left.imag(), b.psi_left.real(), b.psi_left.imag());
        }
    }
    out["rows"] = rows;
    write_json_file(fs::path(opts.out_dir) / "exponents.json", out);
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate(const CommonOpts& opts, std::optional<std::int64_t> paths_override) {
    xcir::ScenarioConfig cfg = xcir::load_scenario(opts.config_path);
    print_warnings(cfg);
    auto [seed, seed_source] = resolve_seed(opts, cfg);
    std::int64_t n_paths = paths_override.value_or(cfg.mc.n_paths);
    if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    fs::create_directories(opts.out_dir);

    bool all_pass = true;
    ordered_json report = run_header(cfg, seed, seed_source);
    report["n_paths"] = n_paths;

    // 1. characteristic-function comparison
    if (cfg.u_grid.empty()) throw std::invalid_argument("validate: config needs a u_grid");
    xcir::CFComparisonReport cf = xcir::compare_affine(cfg, cfg.horizon, cfg.u_grid,
                                                       n_paths, seed, opts.threads);
    std::cout << xcir::to_text(cf) << '\n';
    report["characteristic_function"] = xcir::to_json(cf);
    all_pass = all_pass && cf.pass;

    // 2. compensator identity
    auto tests = xcir::default_compensator_tests(cfg.schedule);
    xcir::CompensatorReport comp =
        xcir::compensator_check(cfg.schedule, tests, 100000, seed + 1);
    std::cout << xcir::to_text(comp) << '\n';
    report["compensator"] = xcir::to_json(comp);
    all_pass = all_pass && comp.pass;

    // 3. dual-construction KS (time-change scenarios only)
    if (!cfg.schedule.entries.empty() && cfg.schedule.all_time_change()) {
        const std::size_t n_ks = 10000;
        xcir::Rng ra(seed + 2), rb(seed + 3);
        std::vector<double> a(n_ks), b(n_ks);
        for (auto& v : a) v = xcir::simulate_terminal(cfg, cfg.horizon, ra);
        for (auto& v : b)
            v = xcir::simulate_time_changed(cfg.params, cfg.schedule, cfg.horizon, rb);
        double d = xcir::ks_statistic_two_sample(a, b);
        double p = xcir::ks_pvalue_two_sample(d, n_ks, n_ks);
        bool pass = p >= 0.01;
        std::cout << "dual-construction KS: D=" << d << " p=" << p << " -> "
                  << (pass ? "pass" : "FAIL") << "\n\n";
        report["dual_construction_ks"] = {{"check", "dual_construction_ks"},
                                          {"n_each", n_ks},
                                          {"statistic", d},
                                          {"p_value", p},
                                          {"pass", pass}};
        all_pass = all_pass && pass;
    }

    // 4. stationary-limit sweep
    if (cfg.params.kappa > 0.0 && cfg.params.sigma > 0.0) {
        std::vector<xcir::Complex> ug = cfg.u_grid;
        std::vector<double> xs = {0.0, 1.0, 5.0};
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        auto sweep = ordered_json::array();
        for (double delta : {10.0, 100.0, 1000.0, 10000.0}) {
            auto r = xcir::stationary_limit_check(cfg.params, delta, ug, xs);
            monotone = monotone && r.max_abs_dev <= prev + 1e-15;
            prev = r.max_abs_dev;
            sweep.push_back({{"delta", delta}, {"max_abs_dev", r.max_abs_dev}});
        }
        auto rl = xcir::stationary_limit_check(cfg.params, 1e6, ug, xs);
        bool limit_ok = rl.max_abs_dev <= 1e-6;
        bool pass = monotone && limit_ok;
        std::cout << "stationary limit: dev(1e6)=" << rl.max_abs_dev
                  << (monotone ? ", monotone" : ", NOT monotone") << " -> "
                  << (pass ? "pass" : "FAIL") << "\n";
        report["stationary_limit"] = {{"check", "stationary_limit"},
                                      {"sweep", sweep},
                                      {"dev_at_1e6", rl.max_abs_dev},
                                      {"monotone", monotone},
                                      {"pass", pass}};
        all_pass = all_pass && pass;
    }

    report["pass"] = all_pass;
    write_json_file(fs::path(opts.out_dir) / "validate_report.json", report);
    std::cout << (all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_covariance(const CommonOpts& opts, std::size_t n, std::size_t m,
                   std::optional<std::int64_t> paths_override) {
    xcir::ScenarioConfig cfg = xcir::load_scenario(opts.config_path);
    print_warnings(cfg);
    auto [seed, seed_source] = resolve_seed(opts, cfg);
    std::int64_t n_paths = paths_override.value_or(cfg.mc.n_paths);
    if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    fs::create_directories(opts.out_dir);

    xcir::Rng rng(seed);
    xcir::CovEstimate mc = xcir::jump_covariance_mc(cfg, n, m, n_paths, rng);

    ordered_json out = run_header(cfg, seed, seed_source);
    out["n"] = n;
    out["m"] = m;
    out["n_paths"] = n_paths;
    out["mc_estimate"] = mc.value;
    out["mc_std_error"] = mc.std_error;
    std::cout << "c(" << n << "," << m << ") = " << mc.value << " +/- " << mc.std_error
              << "  (" << n_paths << " paths)\n";

    if (cfg.schedule.all_time_change() && cfg.params.kappa > 0.0) {
        double analytic = xcir::jump_covariance_analytic_tc(cfg.params, cfg.schedule, n, m);
        double z = xcir::z_score(mc.value, analytic, mc.std_error);
        out["analytic"] = analytic;
        out["z"] = z;
        std::cout << "analytic (time-change dual) = " << analytic << ", z = " << z << "\n";
    }
    write_json_file(fs::path(opts.out_dir) / "covariance.json", out);
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_check_jumps(const CommonOpts& opts) {
    xcir::ScenarioConfig cfg = xcir::load_scenario(opts.config_path);
    print_warnings(cfg);
    fs::create_directories(opts.out_dir);

    bool all_pass = true;
    ordered_json report;
    report["config_hash"] = xcir::config_hash(cfg);
    auto entries = ordered_json::array();

    for (std::size_t i = 0; i < cfg.schedule.entries.size(); ++i) {
        const auto& entry = cfg.schedule.entries[i];
        ordered_json je;
        je["jump"] = i + 1;
        je["time"] = entry.time;
        je["model"] = xcir::model_name(entry.model);

        bool entry_pass = true;
        try {
            xcir::ExponentPair pair = xcir::exponents(entry.model, cfg.params);
            xcir::AdmissibilityReport adm = xcir::check_admissibility(pair);
            je["lim_gamma0_over_y"] = adm.lim_gamma0_over_y;
            je["lim_gamma1_over_y"] = adm.lim_gamma1_over_y;
            je["growth_bound_c"] = adm.growth_bound_c;
            je["admissible"] = adm.pass;
            entry_pass = adm.pass;

            auto infs = ordered_json::array();
            for (double x : {0.5, 1.0, 5.0}) {
                xcir::LimitEstimate le = xcir::support_infimum(pair, x);
                infs.push_back({{"x", x}, {"inf_supp", le.value}, {"error", le.error}});
            }
            je["support_infimum"] = infs;
        } catch (const std::exception& ex) {
            je["admissible"] = false;
            je["error"] = ex.what();
            entry_pass = false;
        }

        xcir::ConvexSpanReport span =
            xcir::check_full_convex_span(entry.model, cfg.params);
        je["convex_span"] = {{"min_g", span.min_g},
                             {"max_g", span.max_g},
                             {"x_range", {span.x_lo, span.x_hi}},
                             {"spans", span.spans},
                             {"note", span.note}};

        if (!entry_pass) {
            all_pass = false;
            std::cout << "jump " << (i + 1) << " (" << xcir::model_name(entry.model)
                      << " at t=" << entry.time << "): ADMISSIBILITY FAIL\n";
        } else {
            std::cout << "jump " << (i + 1) << " (" << xcir::model_name(entry.model)
                      << " at t=" << entry.time << "): admissible\n";
        }
        entries.push_back(je);
    }
    report["entries"] = entries;
    report["pass"] = all_pass;
    write_json_file(fs::path(opts.out_dir) / "check_jumps.json", report);
    std::cout << (all_pass ? "all jump models admissible"
                           : "INADMISSIBLE JUMP MODELS PRESENT")
              << "\n";
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extended CIR process with scheduled jumps: simulation, "
                 "affine exponents, validation"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    std::optional<std::int64_t> sim_paths;
    bool per_path = false;
    CLI::App* sim = app.add_subcommand("simulate", "simulate paths, write CSV");
    add_common(sim, sim_opts);
    sim->add_option("--paths", sim_paths, "number of paths (overrides config)");
    sim->add_flag("--per-path", per_path, "one CSV file per path instead of long format");

    CommonOpts exp_opts;
    double exp_t = 0.0;
    std::optional<double> exp_T;
    std::vector<std::string> exp_us;
    bool exp_trace = false;
    CLI::App* exp = app.add_subcommand("exponents", "evaluate phi/psi and the CF");
    add_common(exp, exp_opts);
    exp->add_option("--t", exp_t, "evaluation time t (default 0)");
    exp->add_option("--T", exp_T, "horizon T (default config horizon)");
    exp->add_option("--u", exp_us, "u value as re[,im]; repeatable");
    exp->add_flag("--trace", exp_trace, "dump the backward-recursion boundary trace");

    CommonOpts val_opts;
    std::optional<std::int64_t> val_paths;
    CLI::App* val = app.add_subcommand("validate", "run the statistical check suite");
    add_common(val, val_opts);
    val->add_option("--paths", val_paths, "MC paths (overrides config)");

    CommonOpts cov_opts;
    std::size_t cov_n = 1, cov_m = 2;
    std::optional<std::int64_t> cov_paths;
    CLI::App* cov = app.add_subcommand("covariance", "jump covariance c(n,m)");
    add_common(cov, cov_opts);
    cov->add_option("--n", cov_n, "first jump index (1-based)");
    cov->add_option("--m", cov_m, "second jump index (1-based)");
    cov->add_option("--paths", cov_paths, "MC paths (overrides config)");

    CommonOpts chk_opts;
    CLI::App* chk = app.add_subcommand("check-jumps", "admissibility and support diagnostics");
    add_common(chk, chk_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_opts, sim_paths, per_path);
        if (exp->parsed())
            return cmd_exponents(exp_opts, exp_t, exp_T, exp_us, exp_trace);
        if (val->parsed()) return cmd_validate(val_opts, val_paths);
        if (cov->parsed()) return cmd_covariance(cov_opts, cov_n, cov_m, cov_paths);
        if (chk->parsed()) return cmd_check_jumps(chk_opts);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 2;
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xcir/common.hpp"
#include "xcir/jump_model.hpp"
#include "xcir/params.hpp"

namespace xcir {

using json = nlohmann::json;

struct GridSpec {
    std::optional<double> dt;
    std::vector<double> points; // used when dt is absent
};

struct McSettings {
    std::int64_t n_paths = 100000;
    std::optional<std::uint64_t> seed;
    std::int64_t chunk_size = 1000;
};

/*! Validated scenario: immutable after validate_config, safe to share
    across threads. The grid always contains 0, the horizon, and every
    jump time within the horizon, so pre/post jump values are recorded. */
struct ScenarioConfig {
    CIRParams params;
    JumpSchedule schedule;
    double horizon = 0.0;
    GridSpec grid_spec;
    std::vector<double> grid;
    McSettings mc;
    std::vector<Complex> u_grid;
    std::vector<std::string> warnings;
};

namespace detail {

// snap tolerance for identifying grid points with jump times
inline double grid_snap_tol(double horizon) { return 1e-9 * std::max(1.0, horizon); }

inline std::vector<double> build_grid(const GridSpec& spec, double horizon,
                                      const JumpSchedule& schedule) {
    std::vector<double> g;
    if (spec.dt) {
        double dt = *spec.dt;
        if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
        auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
        g.reserve(n + 1);
        for (std::size_t i = 0; i < n; ++i) g.push_back(static_cast<double>(i) * dt);
        g.push_back(horizon);
    } else {
        g = spec.points;
        for (double p : g) {
            if (!std::isfinite(p) || p < 0.0 || p > horizon)
                throw std::invalid_argument("grid: points must lie in [0, horizon]");
        }
        g.push_back(0.0);
        g.push_back(horizon);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    }

    // augment with jump times; snap nearby grid points instead of
    // creating degenerate segments
    const double tol = grid_snap_tol(horizon);
    for (const auto& e : schedule.entries) {
        if (e.time > horizon) continue;
        auto it = std::lower_bound(g.begin(), g.end(), e.time);
        bool snapped = false;
        if (it != g.end() && std::abs(*it - e.time) <= tol) {
            *it = e.time;
            snapped = true;
        }
        // never displace the origin grid point
        if (!snapped && it != g.begin() && *(it - 1) != 0.0 &&
            std::abs(*(it - 1) - e.time) <= tol) {
            *(it - 1) = e.time;
            snapped = true;
        }
        if (!snapped) g.insert(it, e.time);
    }
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline Complex parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_object() || !j.contains("re"))
        throw std::invalid_argument("complex values must be {\"re\": r, \"im\": i}");
    return {j.at("re").get<double>(), j.value("im", 0.0)};
}

inline json complex_to_json(Complex z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

inline JumpModel parse_model(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "none") return NoJump{};
    if (type == "drop_to_gamma") {
        DropToGamma g;
        g.alpha = j.at("alpha").get<double>();
        g.beta = j.value("beta", 0.0);
        g.lambda = j.at("lambda").get<double>();
        return g;
    }
    if (type == "time_change") {
        TimeChange tc;
        tc.delta = j.at("delta").get<double>();
        return tc;
    }
    if (type == "proportional") {
        // xi = factor * x; admissible iff factor >= -1
        double f = j.at("factor").get<double>();
        GenericTransport gt;
        gt.transport = [f](double x, double) { return f * x; };
        gt.gamma0 = [](Complex) { return Complex{}; };
        gt.gamma1 = [f](Complex u) { return f * u; };
        gt.meta = json{{"type", "proportional"}, {"factor", f}}.dump();
        return gt;
    }
    if (type == "uniform") {
        // xi ~ Uniform[lo, hi] independent of the state; ships without an
        // exponent pair, so affine machinery refuses it
        double lo = j.at("lo").get<double>();
        double hi = j.at("hi").get<double>();
        if (!(lo <= hi)) throw std::invalid_argument("uniform jump: need lo <= hi");
        GenericTransport gt;
        gt.transport = [lo, hi](double, double z) { return lo + z * (hi - lo); };
        gt.meta = json{{"type", "uniform"}, {"lo", lo}, {"hi", hi}}.dump();
        return gt;
    }
    throw std::invalid_argument("unknown jump model type: " + type);
}

inline json model_to_json(const JumpModel& m) {
    if (std::holds_alternative<NoJump>(m)) return json{{"type", "none"}};
    if (const auto* g = std::get_if<DropToGamma>(&m))
        return json{{"type", "drop_to_gamma"},
                    {"alpha", g->alpha},
                    {"beta", g->beta},
                    {"lambda", g->lambda}};
    if (const auto* tc = std::get_if<TimeChange>(&m))
        return json{{"type", "time_change"}, {"delta", tc->delta}};
    const auto& gt = std::get<GenericTransport>(m);
    if (gt.meta.empty())
        throw std::runtime_error("GenericTransport: model is not serializable");
    return json::parse(gt.meta);
}

} // namespace detail

/*! Validate a raw JSON scenario. Throws std::invalid_argument with a
    specific message on violation; jump times beyond the horizon produce
    a warning, not an error. */
inline ScenarioConfig validate_config(const json& raw) {
    ScenarioConfig cfg;

    const json& jp = raw.at("params");
    cfg.params.kappa = jp.at("kappa").get<double>();
    cfg.params.theta = jp.at("theta").get<double>();
    cfg.params.sigma = jp.at("sigma").get<double>();
    cfg.params.x0 = jp.at("x0").get<double>();
    cfg.params.validate();

    cfg.horizon = raw.at("horizon").get<double>();
    if (!std::isfinite(cfg.horizon) || !(cfg.horizon > 0.0))
        throw std::invalid_argument("horizon must be positive");

    if (raw.contains("schedule")) {
        for (const auto& je : raw.at("schedule")) {
            JumpEntry e;
            e.time = je.at("time").get<double>();
            e.model = detail::parse_model(je.at("model"));
            cfg.schedule.entries.push_back(std::move(e));
        }
    }
    cfg.schedule.validate();
    for (const auto& e : cfg.schedule.entries) {
        if (e.time > cfg.horizon)
            cfg.warnings.push_back("jump time " + std::to_string(e.time) +
                                   " beyond horizon; entry kept but inert");
    }

    const json& jg = raw.at("grid");
    if (jg.contains("dt")) {
        cfg.grid_spec.dt = jg.at("dt").get<double>();
    } else if (jg.contains("points")) {
        cfg.grid_spec.points = jg.at("points").get<std::vector<double>>();
    } else {
        throw std::invalid_argument("grid must specify dt or points");
    }
    cfg.grid = detail::build_grid(cfg.grid_spec, cfg.horizon, cfg.schedule);

    if (raw.contains("mc")) {
        const json& jm = raw.at("mc");
        cfg.mc.n_paths = jm.value("n_paths", cfg.mc.n_paths);
        if (jm.contains("seed")) cfg.mc.seed = jm.at("seed").get<std::uint64_t>();
        cfg.mc.chunk_size = jm.value("chunk_size", cfg.mc.chunk_size);
    }
    if (cfg.mc.n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    if (cfg.mc.chunk_size <= 0) throw std::invalid_argument("chunk_size must be positive");

    if (raw.contains("u_grid")) {
        for (const auto& ju : raw.at("u_grid")) {
            Complex u = detail::parse_complex(ju);
            if (u.real() > 0.0)
                throw std::invalid_argument("u_grid entries must satisfy Re(u) <= 0");
            cfg.u_grid.push_back(u);
        }
    }
    return cfg;
}

inline json to_json(const ScenarioConfig& cfg) {
    json j;
    j["params"] = {{"kappa", cfg.params.kappa},
                   {"theta", cfg.params.theta},
                   {"sigma", cfg.params.sigma},
                   {"x0", cfg.params.x0}};
    j["horizon"] = cfg.horizon;
    json sched = json::array();
    for (const auto& e : cfg.schedule.entries)
        sched.push_back({{"time", e.time}, {"model", detail::model_to_json(e.model)}});
    j["schedule"] = sched;
    if (cfg.grid_spec.dt) {
        j["grid"] = {{"dt", *cfg.grid_spec.dt}};
    } else {
        j["grid"] = {{"points", cfg.grid_spec.points}};
    }
    json mc = {{"n_paths", cfg.mc.n_paths}, {"chunk_size", cfg.mc.chunk_size}};
    if (cfg.mc.seed) mc["seed"] = *cfg.mc.seed;
    j["mc"] = mc;
    json ug = json::array();
    for (Complex u : cfg.u_grid) ug.push_back(detail::complex_to_json(u));
    j["u_grid"] = ug;
    return j;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json raw = json::parse(in);
    return validate_config(raw);
}

} // namespace xcir

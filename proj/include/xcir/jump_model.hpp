#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "xcir/common.hpp"

namespace xcir {

struct NoJump {};

/*! Drop to zero, then up again: the post-jump state is a fresh
    Gamma(alpha + beta * x_pre, rate lambda) variate, so the jump size is
    xi = -x_pre + Gamma(alpha + beta * x_pre, lambda). */
struct DropToGamma {
    double alpha = 1.0;  // > 0
    double beta = 0.0;   // >= 0
    double lambda = 1.0; // rate, > 0
};

/*! Jump generated by inserting an extra stretch of CIR time of length
    delta at the jump date (deterministic clock shift). */
struct TimeChange {
    double delta = 0.0; // >= 0
};

/*! User-supplied transport map F(x, z) with z ~ Uniform(0,1). Carries no
    affinity guarantee; exponent callbacks are optional and required by
    anything that needs the affine representation. */
struct GenericTransport {
    std::function<double(double, double)> transport;
    std::function<Complex(Complex)> gamma0; // may be empty
    std::function<Complex(Complex)> gamma1; // may be empty
    std::string meta; // JSON fragment for round-tripping file-defined models

    bool has_exponents() const { return static_cast<bool>(gamma0) && static_cast<bool>(gamma1); }
};

using JumpModel = std::variant<NoJump, DropToGamma, TimeChange, GenericTransport>;

inline void validate_model(const JumpModel& model) {
    if (const auto* g = std::get_if<DropToGamma>(&model)) {
        if (!(g->alpha > 0.0) || !(g->lambda > 0.0) || !(g->beta >= 0.0))
            throw std::invalid_argument(
                "DropToGamma: need alpha > 0, lambda > 0, beta >= 0");
    } else if (const auto* tc = std::get_if<TimeChange>(&model)) {
        if (!(tc->delta >= 0.0) || !std::isfinite(tc->delta))
            throw std::invalid_argument("TimeChange: delta must be finite and >= 0");
    } else if (const auto* gt = std::get_if<GenericTransport>(&model)) {
        if (!gt->transport)
            throw std::invalid_argument("GenericTransport: transport callback required");
    }
}

inline const char* model_name(const JumpModel& model) {
    switch (model.index()) {
        case 0: return "none";
        case 1: return "drop_to_gamma";
        case 2: return "time_change";
        default: return "generic";
    }
}

struct JumpEntry {
    double time = 0.0;
    JumpModel model;
};

/*! Finite list of scheduled jumps with strictly increasing, strictly
    positive times. Infinite schedules are out of scope; with a finite
    list, jump times trivially do not accumulate. */
struct JumpSchedule {
    std::vector<JumpEntry> entries;

    void validate() const {
        double prev = 0.0;
        for (const auto& e : entries) {
            if (!std::isfinite(e.time) || e.time <= 0.0)
                throw std::invalid_argument("JumpSchedule: jump times must be positive");
            if (e.time <= prev)
                throw std::invalid_argument("JumpSchedule: non-increasing jump times");
            prev = e.time;
            validate_model(e.model);
        }
    }

    // 0-based indices of entries with t < s_n <= T
    std::vector<std::size_t> indices_in(double t, double T) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].time > t && entries[i].time <= T) out.push_back(i);
        }
        return out;
    }

    bool all_time_change() const {
        for (const auto& e : entries)
            if (!std::holds_alternative<TimeChange>(e.model)) return false;
        return true;
    }

    // total clock shift accumulated by jumps up to and including time t
    double time_change_shift(double t) const {
        double h = 0.0;
        for (const auto& e : entries) {
            if (e.time > t) break;
            if (const auto* tc = std::get_if<TimeChange>(&e.model)) h += tc->delta;
        }
        return h;
    }
};

} // namespace xcir

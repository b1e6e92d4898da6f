#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcir/cir_kernel.hpp"
#include "xcir/common.hpp"
#include "xcir/jump_exponents.hpp"
#include "xcir/jump_model.hpp"
#include "xcir/params.hpp"

namespace xcir {

/*! Exponents recorded at one jump boundary during the backward pass.
    The *_right values are phi_s(T,u), psi_s(T,u) and the *_left values
    are the left limits phi_{s-}(T,u), psi_{s-}(T,u) after the jump
    update. jump_index is 1-based, matching s_1 < s_2 < ... */
struct BoundaryRecord {
    std::size_t jump_index = 0;
    double time = 0.0;
    Complex phi_right, psi_right;
    Complex phi_left, psi_left;
};

struct AffineExponents {
    Complex phi{0.0, 0.0};
    Complex psi{0.0, 0.0};
    std::vector<BoundaryRecord> trace; // boundaries in processing order (descending time)
};

/*! Conditional characteristic exponents of the extended process,

        E[exp(u X_T) | F_t] = exp(phi_t(T,u) + psi_t(T,u) X_t),

    by backward recursion from T to t. On jump-free stretches the CIR
    exponents compose (phi accumulates, psi composes); crossing a jump
    time s applies
        phi <- phi + gamma0(psi),  psi <- psi + gamma1(psi),
    both gammas evaluated at the pre-update (right-limit) psi.

    Conventions: a jump exactly at T belongs to (t, T]; a jump exactly
    at t does not. All evaluation uses the principal log branch, which is
    safe because 1 - 2uc and 1 - u/lambda have real part >= 1 on C_-. */
inline AffineExponents extended_exponents(const CIRParams& params,
                                          const JumpSchedule& schedule,
                                          double t, double T, Complex u) {
    if (!(t <= T)) throw std::invalid_argument("extended_exponents: need t <= T");
    if (u.real() > 0.0)
        throw std::domain_error("extended_exponents: transform requires Re(u) <= 0");

    AffineExponents out;
    out.phi = Complex{0.0, 0.0};
    out.psi = u;

    std::vector<std::size_t> idx = schedule.indices_in(t, T);
    double segment_end = T;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        const JumpEntry& entry = schedule.entries[*it];

        PhiPsi seg = cir_exponents(params, segment_end - entry.time, out.psi);
        BoundaryRecord rec;
        rec.jump_index = *it + 1;
        rec.time = entry.time;
        rec.phi_right = out.phi + seg.phi;
        rec.psi_right = seg.psi;

        ExponentPair gamma;
        try {
            gamma = exponents(entry.model, params);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("non-affine jump model in horizon (jump " +
                                     std::to_string(*it + 1) + ")");
        }
        Complex g0 = gamma.gamma0(rec.psi_right);
        Complex g1 = gamma.gamma1(rec.psi_right);
        out.phi = rec.phi_right + g0;
        out.psi = rec.psi_right + g1;

        rec.phi_left = out.phi;
        rec.psi_left = out.psi;
        out.trace.push_back(rec);
        segment_end = entry.time;
    }

    PhiPsi seg = cir_exponents(params, segment_end - t, out.psi);
    out.phi += seg.phi;
    out.psi = seg.psi;
    return out;
}

/*! Conditional characteristic function exp(phi_t(T,u) + psi_t(T,u) x_t). */
inline Complex char_fn(const CIRParams& params, const JumpSchedule& schedule,
                       double t, double T, Complex u, double x_t) {
    if (!(x_t >= 0.0)) throw std::invalid_argument("char_fn: x_t must be >= 0");
    AffineExponents e = extended_exponents(params, schedule, t, T, u);
    return std::exp(e.phi + e.psi * x_t);
}

/*! Residual of the semi-flow identity through an intermediate time s:

        phi_t(T,u) = phi_s(T,u) + phi_t(s, psi_s(T,u))
        psi_t(T,u) = psi_t(s, psi_s(T,u)),

    where the inner exponents run over (t, s] with its own jumps.
    Returns |phi residual| + |psi residual|. */
inline double semiflow_check(const CIRParams& params, const JumpSchedule& schedule,
                             double t, double s, double T, Complex u) {
    if (!(t <= s) || !(s <= T))
        throw std::invalid_argument("semiflow_check: need t <= s <= T");
    AffineExponents full = extended_exponents(params, schedule, t, T, u);
    AffineExponents outer = extended_exponents(params, schedule, s, T, u);
    AffineExponents inner = extended_exponents(params, schedule, t, s, outer.psi);
    return std::abs(full.phi - (outer.phi + inner.phi)) +
           std::abs(full.psi - inner.psi);
}

} // namespace xcir

#pragma once

#include <cstdint>

namespace qmetric {

// Central numeric-tolerance configuration. Every module reads its thresholds
// from here; tests may construct their own instance but production code uses
// the shared default.
struct Tolerances {
    double unit_norm = 1e-12;          // ||psi||_2 - 1
    double weight_sum = 1e-12;         // ensemble weights sum to 1
    double distinct_fidelity = 1e-9;   // states identical iff F >= 1 - this

    double hermitian = 1e-10;          // moment-operator Hermiticity
    double psd = 1e-10;                // moment-operator eigenvalue floor
    double trace_one = 1e-10;          // moment-operator trace

    double swap_circuit = 1e-12;       // circuit vs (1+F)/2 cross-check

    double marginal = 1e-9;            // OT row/col sums vs p, q
    double plan_negativity = 1e-12;    // OT plan entries >= -this
    double dual_feasibility = 1e-9;    // u_i + v_j <= C_ij + this
    double dual_gap = 1e-8;            // primal vs dual objective
    double slackness = 1e-8;           // basic cells: u_i + v_j = C_ij

    double route_agreement = 1e-9;     // pairwise vs moment-operator MMD-k
    double report_clamp = 1e-10;       // distances clamped at -this

    std::int64_t moment_dim_cap = 4096;  // largest allowed d^k
};

inline const Tolerances& tols() {
    static const Tolerances t{};
    return t;
}

}  // namespace qmetric

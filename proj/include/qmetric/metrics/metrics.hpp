#pragma once

#include <optional>
#include <string>

#include "qmetric/ensembles/ensemble.hpp"
#include "qmetric/transport/transport.hpp"

namespace qmetric {

// Population (noise-free) distance between two ensembles. `value` is clamped
// at zero for reporting; `raw` keeps the unclamped number for tests.
struct DistanceReport {
    double value = 0.0;
    double raw = 0.0;
    std::string metric_id;             // "mmd-k" (k spelled out) or "wasserstein"
    std::string route;                 // pairwise | moment-operator | transport
    std::optional<double> f11, f22, f12;  // component terms when applicable
};

// E_{psi~Ea, phi~Eb} |<psi|phi>|^{2k}: the weighted mean of the k-th powers of
// the cross-fidelity table (ordered pairs, i = j included for a = b).
double f_bar(const Ensemble& ea, const Ensemble& eb, int k);

// F11 + F22 - 2*F12 from cross-fidelity tables. Production route.
DistanceReport mmd_k_pairwise(const Ensemble& e1, const Ensemble& e2, int k);

// Squared Hilbert-Schmidt norm of the moment-operator difference;
// cross-validation route, gated by the d^k cap.
DistanceReport mmd_k_moment(const Ensemble& e1, const Ensemble& e2, int k);

// Optimal transport under cost C = 1 - X with the ensemble weights as
// marginals.
DistanceReport wasserstein_exact(const Ensemble& e1, const Ensemble& e2);

// Same, but also exposing the certificate.
OtSolution wasserstein_solution(const Ensemble& e1, const Ensemble& e2);

}  // namespace qmetric

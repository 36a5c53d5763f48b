#pragma once

#include <vector>

#include "qmetric/ensembles/ensemble.hpp"
#include "qmetric/rng.hpp"

namespace qmetric::testing {

// Haar states with either uniform or random positive weights.
inline Ensemble random_ensemble(int d, int n, Rng& rng, bool uniform_weights = false) {
    std::vector<Ensemble::Entry> entries;
    std::vector<double> w(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double& x : w) {
        x = uniform_weights ? 1.0 : rng.uniform() + 0.05;
        sum += x;
    }
    for (int i = 0; i < n; ++i)
        entries.push_back({w[std::size_t(i)] / sum, haar_state(d, rng)});
    return Ensemble(std::move(entries), "test");
}

inline PureState qubit(double a0r, double a0i, double a1r, double a1i) {
    return PureState({cplx(a0r, a0i), cplx(a1r, a1i)}, true);
}

}  // namespace qmetric::testing

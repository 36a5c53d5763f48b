#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qmetric/quantum/state.hpp"

namespace qmetric {

// Weighted list of pairwise-distinct pure states. Weights are strictly
// positive and sum to 1; two states are "the same" iff their fidelity exceeds
// 1 - distinct_fidelity (global phase is invisible to every metric here).
class Ensemble {
  public:
    struct Entry {
        double weight;
        PureState state;
    };

    Ensemble(std::vector<Entry> entries, std::string kind = "");

    int size() const { return int(entries_.size()); }
    int dim() const { return entries_.front().state.dim(); }
    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& entry(int i) const { return entries_[std::size_t(i)]; }
    const std::string& kind() const { return kind_; }

    std::vector<double> weights() const;
    // States flattened contiguously (size * dim), for the kernel layer.
    std::vector<cplx> packed_states() const;

    Ensemble permuted(const std::vector<int>& order) const;

  private:
    std::vector<Entry> entries_;
    std::string kind_;
};

// N1 x N2 table of |<psi_i|phi_j>|^2, row-major.
struct FidelityTable {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    double at(int i, int j) const { return values[std::size_t(i) * cols + j]; }
    double& at(int i, int j) { return values[std::size_t(i) * cols + j]; }
};

FidelityTable cross_fidelities(const Ensemble& a, const Ensemble& b);

// --- generators ---------------------------------------------------------------

// Qubit states proportional to |0> + s*c|1>, Re(c), Im(c) ~ N(0,1) i.i.d.;
// uniform weights.
Ensemble cluster_ensemble(int n, double s, Rng& rng);

// cos(theta)|0> + sin(theta)|1> with theta uniform on [0, 2*pi); uniform
// weights. (e^{-i theta Y} applied to |0>.)
Ensemble circular_ensemble(int n, Rng& rng);

// The N equal-weight phase states (|0> + e^{i(theta + 2*pi*l/N)}|1>)/sqrt(2).
// (hard_pair(N, 0), hard_pair(N, pi/N)) is the hard instance: moment
// operators agree through order N-1 and differ at order N.
Ensemble hard_pair(int n, double theta);

// Computational-basis states carrying the given weights; zero entries are
// dropped.
Ensemble basis_ensemble(const std::vector<double>& weights, int d);

// N Haar-random states in dimension d, uniform weights.
Ensemble haar_ensemble(int n, int d, Rng& rng);

// Realize a cross-fidelity table with all entries < 1/N (N = rows = cols):
// two uniform N-state ensembles in dimension 2N with |<psi_i|phi_j>|^2 equal
// to the table exactly.
std::pair<Ensemble, Ensemble> from_fidelity_table(const FidelityTable& table);

}  // namespace qmetric

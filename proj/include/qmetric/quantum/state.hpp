#pragma once

#include <complex>
#include <vector>

#include "qmetric/rng.hpp"

namespace qmetric {

using cplx = std::complex<double>;

// Unit vector in C^d, d >= 2. Construction validates the norm; generators
// that build amplitudes on the fly normalize first and then construct.
class PureState {
  public:
    PureState(std::vector<cplx> amplitudes, bool normalize = false);

    int dim() const { return int(amps_.size()); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    const cplx* data() const { return amps_.data(); }

    double norm() const;

    static PureState basis(int d, int index);

  private:
    std::vector<cplx> amps_;
};

// |<a|b>|^2; throws on dimension mismatch.
double fidelity(const PureState& a, const PureState& b);

// State distributed by the unitarily invariant measure: normalize a vector of
// i.i.d. standard complex Gaussians. Requires d >= 2.
PureState haar_state(int d, Rng& rng);

// Haar-random unit vector in the orthogonal complement of `center`.
PureState haar_orthogonal(const PureState& center, Rng& rng);

// sqrt(1-eps_b)|center> + sqrt(eps_b)|chi> with chi Haar in the orthogonal
// complement, so fidelity(out, center) = 1 - eps_b exactly. eps_b in [0, 1).
PureState eps_ball_state(const PureState& center, double eps_b, Rng& rng);

enum class DepolarizeMode { renormalized, raw_average };

// One pure-state realization of the depolarizing channel with probability
// lambda_b: an eps-ball draw at radius eps_b = (1 - 1/d) * lambda_b. The
// perturbation lives in the orthogonal complement of the input, which makes
// the average outer product equal the channel output exactly; the
// superposition is then already unit-norm, so the two modes differ only in
// whether a final renormalization pass is applied.
PureState depolarize_sample(const PureState& input, double lambda_b, Rng& rng,
                            DepolarizeMode mode = DepolarizeMode::renormalized);

// Statevector simulation of the SWAP test (H on the ancilla, qubit-pairwise
// Fredkin gates, H again); returns Pr[ancilla = 0]. Dimensions must match and
// be a power of two.
double swap_test_circuit_prob(const PureState& a, const PureState& b);

}  // namespace qmetric

#include "qmetric/quantum/state.hpp"

#include <cmath>
#include <stdexcept>

#include "qmetric/kernels/kernels.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

PureState::PureState(std::vector<cplx> amplitudes, bool normalize)
    : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2) throw std::invalid_argument("PureState: dimension must be >= 2");
    double n = 0.0;
    for (const cplx& a : amps_) n += std::norm(a);
    n = std::sqrt(n);
    if (normalize) {
        if (n == 0.0) throw std::invalid_argument("PureState: cannot normalize zero vector");
        for (cplx& a : amps_) a /= n;
    } else if (std::abs(n - 1.0) > tols().unit_norm) {
        throw std::invalid_argument("PureState: vector is not unit-norm");
    }
}

double PureState::norm() const {
    double n = 0.0;
    for (const cplx& a : amps_) n += std::norm(a);
    return std::sqrt(n);
}

PureState PureState::basis(int d, int index) {
    if (index < 0 || index >= d) throw std::invalid_argument("PureState::basis: index out of range");
    std::vector<cplx> v(d, cplx(0.0, 0.0));
    v[index] = cplx(1.0, 0.0);
    return PureState(std::move(v));
}

double fidelity(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    return kernels::cdot_abs2(a.data(), b.data(), std::size_t(a.dim()));
}

PureState haar_state(int d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("haar_state: d must be >= 2");
    std::vector<cplx> v(d);
    for (cplx& a : v) a = cplx(rng.normal(), rng.normal());
    return PureState(std::move(v), true);
}

PureState haar_orthogonal(const PureState& center, Rng& rng) {
    const int d = center.dim();
    for (;;) {
        std::vector<cplx> g(d);
        for (cplx& a : g) a = cplx(rng.normal(), rng.normal());
        // project out the center component
        cplx overlap(0.0, 0.0);
        for (int i = 0; i < d; ++i) overlap += std::conj(center.data()[i]) * g[i];
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            g[i] -= overlap * center.data()[i];
            n2 += std::norm(g[i]);
        }
        if (n2 > 1e-24) {
            const double inv = 1.0 / std::sqrt(n2);
            for (cplx& a : g) a *= inv;
            return PureState(std::move(g));
        }
        // g was (numerically) parallel to the center; redraw
    }
}

PureState eps_ball_state(const PureState& center, double eps_b, Rng& rng) {
    if (!(eps_b >= 0.0 && eps_b < 1.0))
        throw std::invalid_argument("eps_ball_state: eps_b must be in [0,1)");
    if (eps_b == 0.0) return center;
    const PureState chi = haar_orthogonal(center, rng);
    const double ca = std::sqrt(1.0 - eps_b), cb = std::sqrt(eps_b);
    std::vector<cplx> v(center.dim());
    for (int i = 0; i < center.dim(); ++i)
        v[i] = ca * center.data()[i] + cb * chi.data()[i];
    return PureState(std::move(v));
}

PureState depolarize_sample(const PureState& input, double lambda_b, Rng& rng,
                            DepolarizeMode mode) {
    if (!(lambda_b >= 0.0 && lambda_b < 1.0))
        throw std::invalid_argument("depolarize_sample: lambda_b must be in [0,1)");
    if (lambda_b == 0.0) return input;
    const double eps_b = (1.0 - 1.0 / double(input.dim())) * lambda_b;
    const PureState out = eps_ball_state(input, eps_b, rng);
    if (mode == DepolarizeMode::renormalized)
        return PureState(out.amplitudes(), true);
    return out;
}

namespace {

bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

int log2_exact(int d) {
    int n = 0;
    while ((1 << n) < d) ++n;
    return n;
}

// Single-qubit Hadamard on qubit q (qubit 0 = most significant bit).
void apply_h(std::vector<cplx>& amp, int n_qubits, int q) {
    const std::size_t stride = std::size_t(1) << (n_qubits - 1 - q);
    const double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t base = 0; base < amp.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amp[i];
            const cplx a1 = amp[i + stride];
            amp[i] = inv_sqrt2 * (a0 + a1);
            amp[i + stride] = inv_sqrt2 * (a0 - a1);
        }
    }
}

// Fredkin gate: swap qubits qa and qb in the branch where qubit `ctrl` is 1.
void apply_fredkin(std::vector<cplx>& amp, int n_qubits, int ctrl, int qa, int qb) {
    const std::size_t mc = std::size_t(1) << (n_qubits - 1 - ctrl);
    const std::size_t ma = std::size_t(1) << (n_qubits - 1 - qa);
    const std::size_t mb = std::size_t(1) << (n_qubits - 1 - qb);
    for (std::size_t s = 0; s < amp.size(); ++s) {
        if ((s & mc) && (s & ma) && !(s & mb)) {
            const std::size_t t = (s & ~ma) | mb;
            std::swap(amp[s], amp[t]);
        }
    }
}

}  // namespace

double swap_test_circuit_prob(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("swap_test_circuit_prob: dimension mismatch");
    if (!is_power_of_two(a.dim()))
        throw std::invalid_argument("swap_test_circuit_prob: dimension must be a power of 2");
    const int n = log2_exact(a.dim());
    const int n_qubits = 1 + 2 * n;

    // |0> (x) |a> (x) |b>, ancilla is qubit 0
    std::vector<cplx> amp(std::size_t(1) << n_qubits, cplx(0.0, 0.0));
    const std::size_t d = std::size_t(a.dim());
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
            amp[x * d + y] = a.data()[x] * b.data()[y];

    apply_h(amp, n_qubits, 0);
    for (int q = 0; q < n; ++q) apply_fredkin(amp, n_qubits, 0, 1 + q, 1 + n + q);
    apply_h(amp, n_qubits, 0);

    // Pr[ancilla = 0): sum over the ancilla-0 half of the register
    double acc = 0.0;
    for (std::size_t s = 0; s < d * d; ++s) acc += std::norm(amp[s]);
    return acc;
}

}  // namespace qmetric

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qmetric/ensembles/ensemble.hpp"

namespace qmetric {

// d^k exceeded the configured side cap for the verification route.
class CapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// k-th moment operator of an ensemble: sum_x p_x (|psi_x><psi_x|)^{(x) k},
// a Hermitian PSD trace-1 matrix of side dim^order (row-major).
struct MomentOperator {
    std::vector<cplx> matrix;
    std::int64_t side = 0;
    int order = 0;
    int dim = 0;

    cplx at(std::int64_t r, std::int64_t c) const {
        return matrix[std::size_t(r * side + c)];
    }

    struct Deviations {
        double hermitian;   // max |M_rc - conj(M_cr)|
        double trace;       // |Tr M - 1|
        bool psd;           // Cholesky of M + psd_tol*I succeeded
    };
    Deviations check_invariants() const;
};

std::int64_t moment_side(int dim, int order);  // dim^order, throws past the cap

MomentOperator moment_operator(const Ensemble& ensemble, int order);

// Trace out tensor factor `factor` (0 = leftmost); yields the order-(k-1)
// moment operator of the same ensemble.
MomentOperator partial_trace_factor(const MomentOperator& m, int factor);

// Tr(A B) for Hermitian A, B of equal side (real up to rounding).
double hs_inner(const MomentOperator& a, const MomentOperator& b);

// Frame-potential-style self overlap E_{psi,phi~E} |<psi|phi>|^{2k}
// = Tr(M_k(E)^2), computed by the pairwise route.
double self_overlap(const Ensemble& ensemble, int order);

}  // namespace qmetric

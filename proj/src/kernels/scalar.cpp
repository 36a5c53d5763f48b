#include "kernels_impl.hpp"

// Reference kernels. These define the semantics the SIMD variants must match.

namespace qmetric::kernels {
namespace {

double cdot_abs2_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;  // Re(conj(a) * b)
        im += ar * bi - ai * br;  // Im(conj(a) * b)
    }
    return re * re + im * im;
}

void fidelity_table_scalar(const cplx* a, std::size_t na, const cplx* b,
                           std::size_t nb, std::size_t dim, double* out) {
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            out[i * nb + j] = cdot_abs2_scalar(a + i * dim, b + j * dim, dim);
}

double weighted_power_sum_scalar(const double* x, const double* wa, std::size_t na,
                                 const double* wb, std::size_t nb, int k) {
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const double v = x[i * nb + j];
            double pk = v;
            for (int t = 1; t < k; ++t) pk *= v;
            row += wb[j] * pk;
        }
        total += wa[i] * row;
    }
    return total;
}

void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double min_reduced_cost_scalar(const double* c, const double* u, std::size_t na,
                               const double* v, std::size_t nb, std::size_t* index) {
    double best = c[0] - u[0] - v[0];
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < na; ++i) {
        const double ui = u[i];
        const double* row = c + i * nb;
        for (std::size_t j = 0; j < nb; ++j) {
            const double rc = row[j] - ui - v[j];
            if (rc < best) {
                best = rc;
                best_idx = i * nb + j;
            }
        }
    }
    *index = best_idx;
    return best;
}

}  // namespace

const KernelTable scalar_table = {
    cdot_abs2_scalar, fidelity_table_scalar, weighted_power_sum_scalar,
    caxpy_scalar, min_reduced_cost_scalar,
};

}  // namespace qmetric::kernels

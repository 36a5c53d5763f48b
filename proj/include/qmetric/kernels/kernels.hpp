#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace qmetric::kernels {

// Arithmetic inner loops with a scalar reference implementation and SIMD
// variants selected at runtime (AVX2+FMA on x86-64, NEON on aarch64).
// The scalar kernels define the semantics; SIMD variants are equivalence-
// tested against them. min_reduced_cost is bit-identical across backends
// (subtractions only, first-minimum-wins tie handling); the reductions may
// differ by reassociation rounding.

enum class Backend { scalar, avx2, neon };

Backend active_backend();
const char* backend_name(Backend b);
// Force a backend (tests / QMETRIC_KERNEL env). Returns false if the
// requested backend is not available on this machine.
bool set_backend(Backend b);

using cplx = std::complex<double>;

// |<a|b>|^2 for two complex vectors of length n.
double cdot_abs2(const cplx* a, const cplx* b, std::size_t n);

// out[i*nb + j] = |<a_i|b_j>|^2 where a_i = a + i*dim, b_j = b + j*dim.
void fidelity_table(const cplx* a, std::size_t na, const cplx* b, std::size_t nb,
                    std::size_t dim, double* out);

// sum_{i<na, j<nb} wa[i] * wb[j] * x[i*nb+j]^k   (k >= 1)
double weighted_power_sum(const double* x, const double* wa, std::size_t na,
                          const double* wb, std::size_t nb, int k);

// y[i] += alpha * x[i] for complex vectors of length n.
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);

// Minimize c[i*nb+j] - u[i] - v[j] over all (i,j); the first (row-major)
// occurrence of the minimum wins. Returns the minimum, writes its flat index.
double min_reduced_cost(const double* c, const double* u, std::size_t na,
                        const double* v, std::size_t nb, std::size_t* index);

}  // namespace qmetric::kernels

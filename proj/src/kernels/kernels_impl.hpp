#pragma once

#include "qmetric/kernels/kernels.hpp"

namespace qmetric::kernels {

struct KernelTable {
    double (*cdot_abs2)(const cplx*, const cplx*, std::size_t);
    void (*fidelity_table)(const cplx*, std::size_t, const cplx*, std::size_t,
                           std::size_t, double*);
    double (*weighted_power_sum)(const double*, const double*, std::size_t,
                                 const double*, std::size_t, int);
    void (*caxpy)(cplx, const cplx*, cplx*, std::size_t);
    double (*min_reduced_cost)(const double*, const double*, std::size_t,
                               const double*, std::size_t, std::size_t*);
};

extern const KernelTable scalar_table;
#if defined(QMETRIC_HAVE_AVX2_SOURCES)
extern const KernelTable avx2_table;
#endif
#if defined(QMETRIC_HAVE_NEON_SOURCES)
extern const KernelTable neon_table;
#endif

}  // namespace qmetric::kernels

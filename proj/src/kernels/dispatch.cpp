#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace qmetric::kernels {
namespace {

struct Active {
    const KernelTable* table;
    Backend backend;
};

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(QMETRIC_HAVE_AVX2_SOURCES)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(QMETRIC_HAVE_NEON_SOURCES)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
#if defined(QMETRIC_HAVE_AVX2_SOURCES)
        case Backend::avx2:
            return &avx2_table;
#endif
#if defined(QMETRIC_HAVE_NEON_SOURCES)
        case Backend::neon:
            return &neon_table;
#endif
        default:
            return &scalar_table;
    }
}

Active pick_default() {
    // QMETRIC_KERNEL=scalar|avx2|neon overrides auto-detection.
    if (const char* env = std::getenv("QMETRIC_KERNEL")) {
        Backend want = Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) want = Backend::avx2;
        else if (std::strcmp(env, "neon") == 0) want = Backend::neon;
        if (backend_available(want)) return {table_for(want), want};
    }
    if (backend_available(Backend::avx2)) return {table_for(Backend::avx2), Backend::avx2};
    if (backend_available(Backend::neon)) return {table_for(Backend::neon), Backend::neon};
    return {&scalar_table, Backend::scalar};
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelTable* active() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        Active a = pick_default();
        g_backend.store(a.backend, std::memory_order_relaxed);
        g_table.store(a.table, std::memory_order_release);
        t = a.table;
    }
    return t;
}

}  // namespace

Backend active_backend() {
    active();
    return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(table_for(b), std::memory_order_release);
    return true;
}

double cdot_abs2(const cplx* a, const cplx* b, std::size_t n) {
    return active()->cdot_abs2(a, b, n);
}

void fidelity_table(const cplx* a, std::size_t na, const cplx* b, std::size_t nb,
                    std::size_t dim, double* out) {
    active()->fidelity_table(a, na, b, nb, dim, out);
}

double weighted_power_sum(const double* x, const double* wa, std::size_t na,
                          const double* wb, std::size_t nb, int k) {
    return active()->weighted_power_sum(x, wa, na, wb, nb, k);
}

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    active()->caxpy(alpha, x, y, n);
}

double min_reduced_cost(const double* c, const double* u, std::size_t na,
                        const double* v, std::size_t nb, std::size_t* index) {
    return active()->min_reduced_cost(c, u, na, v, nb, index);
}

}  // namespace qmetric::kernels

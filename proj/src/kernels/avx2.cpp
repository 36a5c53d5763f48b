#include <immintrin.h>

#include "kernels_impl.hpp"

// AVX2 + FMA variants. Entered only behind the runtime cpuid check in
// dispatch.cpp; this translation unit is the only one compiled with -mavx2.

namespace qmetric::kernels {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double cdot_abs2_avx2(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const std::size_t n2 = (n / 2) * 2;  // complex elements handled per vector

    // acc_p accumulates a .* b elementwise, acc_q accumulates a .* swap(b);
    // the real part is the plain sum of acc_p, the imaginary part is the
    // alternating sum of acc_q.
    __m256d acc_p = _mm256_setzero_pd();
    __m256d acc_q = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d vb_sw = _mm256_permute_pd(vb, 0b0101);
        acc_p = _mm256_fmadd_pd(va, vb, acc_p);
        acc_q = _mm256_fmadd_pd(va, vb_sw, acc_q);
    }
    const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    double re = hsum(acc_p);
    double im = hsum(_mm256_mul_pd(acc_q, sign));
    for (std::size_t i = n2; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return re * re + im * im;
}

void fidelity_table_avx2(const cplx* a, std::size_t na, const cplx* b,
                         std::size_t nb, std::size_t dim, double* out) {
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            out[i * nb + j] = cdot_abs2_avx2(a + i * dim, b + j * dim, dim);
}

double weighted_power_sum_avx2(const double* x, const double* wa, std::size_t na,
                               const double* wb, std::size_t nb, int k) {
    const std::size_t nb4 = (nb / 4) * 4;
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double* row = x + i * nb;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < nb4; j += 4) {
            const __m256d v = _mm256_loadu_pd(row + j);
            __m256d pk = v;
            for (int t = 1; t < k; ++t) pk = _mm256_mul_pd(pk, v);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(wb + j), pk, acc);
        }
        double rowsum = hsum(acc);
        for (std::size_t j = nb4; j < nb; ++j) {
            const double v = row[j];
            double pk = v;
            for (int t = 1; t < k; ++t) pk *= v;
            rowsum += wb[j] * pk;
        }
        total += wa[i] * rowsum;
    }
    return total;
}

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double p = alpha.real(), q = alpha.imag();
    const __m256d vp = _mm256_set1_pd(p);
    const __m256d vq = _mm256_setr_pd(-q, q, -q, q);
    double* py = reinterpret_cast<double*>(y);
    const double* px = reinterpret_cast<const double*>(x);
    const std::size_t n2 = (n / 2) * 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        const __m256d vx_sw = _mm256_permute_pd(vx, 0b0101);
        __m256d vy = _mm256_loadu_pd(py + 2 * i);
        vy = _mm256_fmadd_pd(vp, vx, vy);
        vy = _mm256_fmadd_pd(vq, vx_sw, vy);
        _mm256_storeu_pd(py + 2 * i, vy);
    }
    for (std::size_t i = n2; i < n; ++i) y[i] += alpha * x[i];
}

double min_reduced_cost_avx2(const double* c, const double* u, std::size_t na,
                             const double* v, std::size_t nb, std::size_t* index) {
    // Subtractions only, same association as the scalar kernel, so values are
    // bit-identical; the first-occurrence tie rule is preserved by rescanning
    // a row only when its minimum is strictly smaller than the running best.
    double best = c[0] - u[0] - v[0];
    std::size_t best_idx = 0;
    const std::size_t nb4 = (nb / 4) * 4;
    for (std::size_t i = 0; i < na; ++i) {
        const double ui = u[i];
        const double* row = c + i * nb;
        __m256d vmin = _mm256_set1_pd(best);
        const __m256d vu = _mm256_set1_pd(ui);
        for (std::size_t j = 0; j < nb4; j += 4) {
            const __m256d rc = _mm256_sub_pd(
                _mm256_sub_pd(_mm256_loadu_pd(row + j), vu), _mm256_loadu_pd(v + j));
            vmin = _mm256_min_pd(vmin, rc);
        }
        __m128d m = _mm_min_pd(_mm256_castpd256_pd128(vmin),
                               _mm256_extractf128_pd(vmin, 1));
        double row_min = _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
        for (std::size_t j = nb4; j < nb; ++j) {
            const double rc = row[j] - ui - v[j];
            if (rc < row_min) row_min = rc;
        }
        if (row_min < best) {
            best = row_min;
            for (std::size_t j = 0; j < nb; ++j) {
                if (row[j] - ui - v[j] == row_min) {
                    best_idx = i * nb + j;
                    break;
                }
            }
        }
    }
    *index = best_idx;
    return best;
}

}  // namespace

const KernelTable avx2_table = {
    cdot_abs2_avx2, fidelity_table_avx2, weighted_power_sum_avx2,
    caxpy_avx2, min_reduced_cost_avx2,
};

}  // namespace qmetric::kernels

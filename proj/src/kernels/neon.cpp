#include <arm_neon.h>

#include "kernels_impl.hpp"

// NEON variants (aarch64, float64x2: one complex double per vector).

namespace qmetric::kernels {
namespace {

double cdot_abs2_neon(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    float64x2_t acc_p = vdupq_n_f64(0.0);  // [sum ar*br, sum ai*bi]
    float64x2_t acc_q = vdupq_n_f64(0.0);  // [sum ar*bi, sum ai*br]
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t va = vld1q_f64(pa + 2 * i);
        const float64x2_t vb = vld1q_f64(pb + 2 * i);
        acc_p = vfmaq_f64(acc_p, va, vb);
        acc_q = vfmaq_f64(acc_q, va, vextq_f64(vb, vb, 1));
    }
    const double re = vaddvq_f64(acc_p);
    const double im = vgetq_lane_f64(acc_q, 0) - vgetq_lane_f64(acc_q, 1);
    return re * re + im * im;
}

void fidelity_table_neon(const cplx* a, std::size_t na, const cplx* b,
                         std::size_t nb, std::size_t dim, double* out) {
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            out[i * nb + j] = cdot_abs2_neon(a + i * dim, b + j * dim, dim);
}

double weighted_power_sum_neon(const double* x, const double* wa, std::size_t na,
                               const double* wb, std::size_t nb, int k) {
    const std::size_t nb2 = (nb / 2) * 2;
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double* row = x + i * nb;
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < nb2; j += 2) {
            const float64x2_t v = vld1q_f64(row + j);
            float64x2_t pk = v;
            for (int t = 1; t < k; ++t) pk = vmulq_f64(pk, v);
            acc = vfmaq_f64(acc, vld1q_f64(wb + j), pk);
        }
        double rowsum = vaddvq_f64(acc);
        for (std::size_t j = nb2; j < nb; ++j) {
            const double v = row[j];
            double pk = v;
            for (int t = 1; t < k; ++t) pk *= v;
            rowsum += wb[j] * pk;
        }
        total += wa[i] * rowsum;
    }
    return total;
}

void caxpy_neon(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const float64x2_t vp = vdupq_n_f64(alpha.real());
    const double qpat[2] = {-alpha.imag(), alpha.imag()};
    const float64x2_t vq = vld1q_f64(qpat);
    double* py = reinterpret_cast<double*>(y);
    const double* px = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t vx = vld1q_f64(px + 2 * i);
        float64x2_t vy = vld1q_f64(py + 2 * i);
        vy = vfmaq_f64(vy, vp, vx);
        vy = vfmaq_f64(vy, vq, vextq_f64(vx, vx, 1));
        vst1q_f64(py + 2 * i, vy);
    }
}

double min_reduced_cost_neon(const double* c, const double* u, std::size_t na,
                             const double* v, std::size_t nb, std::size_t* index) {
    double best = c[0] - u[0] - v[0];
    std::size_t best_idx = 0;
    const std::size_t nb2 = (nb / 2) * 2;
    for (std::size_t i = 0; i < na; ++i) {
        const double ui = u[i];
        const double* row = c + i * nb;
        float64x2_t vmin = vdupq_n_f64(best);
        const float64x2_t vu = vdupq_n_f64(ui);
        for (std::size_t j = 0; j < nb2; j += 2) {
            const float64x2_t rc =
                vsubq_f64(vsubq_f64(vld1q_f64(row + j), vu), vld1q_f64(v + j));
            vmin = vminq_f64(vmin, rc);
        }
        double row_min = vminvq_f64(vmin);
        for (std::size_t j = nb2; j < nb; ++j) {
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

const KernelTable neon_table = {
    cdot_abs2_neon, fidelity_table_neon, weighted_power_sum_neon,
    caxpy_neon, min_reduced_cost_neon,
};

}  // namespace qmetric::kernels

#include "qmetric/quantum/moment.hpp"

#include <cmath>
#include <stdexcept>

#include "qmetric/kernels/kernels.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

std::int64_t moment_side(int dim, int order) {
    if (order < 1) throw std::invalid_argument("moment_side: order must be >= 1");
    std::int64_t side = 1;
    for (int t = 0; t < order; ++t) {
        side *= dim;
        if (side > tols().moment_dim_cap)
            throw CapExceeded("moment operator: d^k exceeds the configured cap");
    }
    return side;
}

MomentOperator moment_operator(const Ensemble& ensemble, int order) {
    const int d = ensemble.dim();
    const std::int64_t side = moment_side(d, order);

    MomentOperator m;
    m.side = side;
    m.order = order;
    m.dim = d;
    m.matrix.assign(std::size_t(side) * std::size_t(side), cplx(0.0, 0.0));

    std::vector<cplx> power, next, power_conj;
    for (const auto& entry : ensemble.entries()) {
        // k-fold tensor power of the state vector
        power.assign(1, cplx(1.0, 0.0));
        for (int t = 0; t < order; ++t) {
            next.assign(power.size() * std::size_t(d), cplx(0.0, 0.0));
            for (std::size_t r = 0; r < power.size(); ++r)
                for (int a = 0; a < d; ++a)
                    next[r * std::size_t(d) + std::size_t(a)] =
                        power[r] * entry.state.data()[a];
            power.swap(next);
        }
        power_conj.resize(power.size());
        for (std::size_t s = 0; s < power.size(); ++s)
            power_conj[s] = std::conj(power[s]);
        // rank-1 update: M[r][c] += w * v_r * conj(v_c)
        for (std::int64_t r = 0; r < side; ++r) {
            const cplx alpha = entry.weight * power[std::size_t(r)];
            kernels::caxpy(alpha, power_conj.data(),
                           m.matrix.data() + std::size_t(r) * std::size_t(side),
                           std::size_t(side));
        }
    }
    return m;
}

MomentOperator::Deviations MomentOperator::check_invariants() const {
    Deviations dev{0.0, 0.0, false};
    double tr = 0.0;
    for (std::int64_t r = 0; r < side; ++r) {
        tr += at(r, r).real();
        for (std::int64_t c = r; c < side; ++c) {
            const double h = std::abs(at(r, c) - std::conj(at(c, r)));
            if (h > dev.hermitian) dev.hermitian = h;
        }
    }
    dev.trace = std::abs(tr - 1.0);

    // PSD within psd_tol <=> M + psd_tol*I admits a Cholesky factorization.
    const double tau = tols().psd;
    std::vector<cplx> l(matrix);
    for (std::int64_t j = 0; j < side; ++j) l[std::size_t(j * side + j)] += tau;
    dev.psd = true;
    for (std::int64_t j = 0; j < side && dev.psd; ++j) {
        double diag = l[std::size_t(j * side + j)].real();
        for (std::int64_t t = 0; t < j; ++t) diag -= std::norm(l[std::size_t(j * side + t)]);
        if (diag <= 0.0) {
            dev.psd = false;
            break;
        }
        const double root = std::sqrt(diag);
        l[std::size_t(j * side + j)] = root;
        for (std::int64_t r = j + 1; r < side; ++r) {
            cplx v = l[std::size_t(r * side + j)];
            for (std::int64_t t = 0; t < j; ++t)
                v -= l[std::size_t(r * side + t)] * std::conj(l[std::size_t(j * side + t)]);
            l[std::size_t(r * side + j)] = v / root;
        }
    }
    return dev;
}

MomentOperator partial_trace_factor(const MomentOperator& m, int factor) {
    if (m.order < 2)
        throw std::invalid_argument("partial_trace_factor: order must be >= 2");
    if (factor < 0 || factor >= m.order)
        throw std::invalid_argument("partial_trace_factor: factor out of range");

    const std::int64_t d = m.dim;
    const std::int64_t sub = m.side / d;
    // split index i = hi * (d * lo_size) + t * lo_size + lo at digit `factor`
    std::int64_t lo_size = 1;
    for (int t = m.order - 1; t > factor; --t) lo_size *= d;

    MomentOperator out;
    out.side = sub;
    out.order = m.order - 1;
    out.dim = m.dim;
    out.matrix.assign(std::size_t(sub) * std::size_t(sub), cplx(0.0, 0.0));

    auto expand = [&](std::int64_t packed, std::int64_t t) {
        const std::int64_t hi = packed / lo_size;
        const std::int64_t lo = packed % lo_size;
        return hi * d * lo_size + t * lo_size + lo;
    };
    for (std::int64_t r = 0; r < sub; ++r)
        for (std::int64_t c = 0; c < sub; ++c) {
            cplx acc(0.0, 0.0);
            for (std::int64_t t = 0; t < d; ++t) acc += m.at(expand(r, t), expand(c, t));
            out.matrix[std::size_t(r * sub + c)] = acc;
        }
    return out;
}

double hs_inner(const MomentOperator& a, const MomentOperator& b) {
    if (a.side != b.side) throw std::invalid_argument("hs_inner: side mismatch");
    // Tr(A B) = sum_rc A_rc * B_cr; for Hermitian B, B_cr = conj(B_rc).
    double acc = 0.0;
    for (std::size_t i = 0; i < a.matrix.size(); ++i) {
        const cplx& x = a.matrix[i];
        const cplx& y = b.matrix[i];
        acc += x.real() * y.real() + x.imag() * y.imag();
    }
    return acc;
}

double self_overlap(const Ensemble& ensemble, int order) {
    const FidelityTable t = cross_fidelities(ensemble, ensemble);
    const auto w = ensemble.weights();
    return kernels::weighted_power_sum(t.values.data(), w.data(), std::size_t(t.rows),
                                       w.data(), std::size_t(t.cols), order);
}

}  // namespace qmetric

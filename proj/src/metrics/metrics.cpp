#include "qmetric/metrics/metrics.hpp"

#include <stdexcept>

#include "qmetric/kernels/kernels.hpp"
#include "qmetric/quantum/moment.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

namespace {

DistanceReport make_report(double raw, std::string metric, std::string route) {
    DistanceReport r;
    r.raw = raw;
    r.value = raw < 0.0 ? 0.0 : raw;
    if (raw < -tols().report_clamp)
        throw std::runtime_error("distance computed below the round-off floor: " +
                                 std::to_string(raw));
    r.metric_id = std::move(metric);
    r.route = std::move(route);
    return r;
}

}  // namespace

double f_bar(const Ensemble& ea, const Ensemble& eb, int k) {
    if (ea.dim() != eb.dim()) throw std::invalid_argument("f_bar: dimension mismatch");
    if (k < 1) throw std::invalid_argument("f_bar: k must be >= 1");
    const FidelityTable t = cross_fidelities(ea, eb);
    const auto wa = ea.weights();
    const auto wb = eb.weights();
    return kernels::weighted_power_sum(t.values.data(), wa.data(), std::size_t(t.rows),
                                       wb.data(), std::size_t(t.cols), k);
}

DistanceReport mmd_k_pairwise(const Ensemble& e1, const Ensemble& e2, int k) {
    const double f11 = f_bar(e1, e1, k);
    const double f22 = f_bar(e2, e2, k);
    const double f12 = f_bar(e1, e2, k);
    DistanceReport r =
        make_report(f11 + f22 - 2.0 * f12, "mmd-" + std::to_string(k), "pairwise");
    r.f11 = f11;
    r.f22 = f22;
    r.f12 = f12;
    return r;
}

DistanceReport mmd_k_moment(const Ensemble& e1, const Ensemble& e2, int k) {
    if (e1.dim() != e2.dim())
        throw std::invalid_argument("mmd_k_moment: dimension mismatch");
    const MomentOperator m1 = moment_operator(e1, k);
    const MomentOperator m2 = moment_operator(e2, k);
    // Tr[(M1 - M2)^2] = Tr(M1^2) + Tr(M2^2) - 2 Tr(M1 M2)
    const double raw = hs_inner(m1, m1) + hs_inner(m2, m2) - 2.0 * hs_inner(m1, m2);
    return make_report(raw, "mmd-" + std::to_string(k), "moment-operator");
}

OtSolution wasserstein_solution(const Ensemble& e1, const Ensemble& e2) {
    if (e1.dim() != e2.dim())
        throw std::invalid_argument("wasserstein: dimension mismatch");
    const FidelityTable t = cross_fidelities(e1, e2);
    std::vector<double> cost(t.values.size());
    for (std::size_t s = 0; s < cost.size(); ++s) cost[s] = 1.0 - t.values[s];
    return solve_ot(cost, t.rows, t.cols, e1.weights(), e2.weights());
}

DistanceReport wasserstein_exact(const Ensemble& e1, const Ensemble& e2) {
    const OtSolution sol = wasserstein_solution(e1, e2);
    return make_report(sol.coupling.objective, "wasserstein", "transport");
}

}  // namespace qmetric

#include "qmetric/estimators/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace qmetric {

std::array<std::int64_t, 3> budget_split(std::int64_t m) {
    const std::int64_t third = m / 3;
    return {third, m - 2 * third, third};  // 11, 12, 22
}

double ustat_kernel(std::int64_t pos, std::int64_t neg, int k) {
    const std::int64_t t = pos + neg;
    if (k < 1) throw std::invalid_argument("ustat_kernel: k must be >= 1");
    if (t < k) throw std::invalid_argument("ustat_kernel: needs at least k samples");

    // Falling-factorial products keep every term exact to ~k ulps; the terms'
    // absolute values sum to 1 (Vandermonde), so there is no cancellation blowup.
    auto falling = [](std::int64_t n, int r) {
        double prod = 1.0;
        for (int s = 0; s < r; ++s) prod *= double(n - s);
        return prod;
    };
    const double denom = falling(t, k);
    double z = 0.0;
    double binom_kj = 1.0;  // C(k, j), updated multiplicatively
    for (int j = 0; j <= k; ++j) {
        if (j > 0) binom_kj = binom_kj * double(k - j + 1) / double(j);
        if (j > pos || k - j > neg) continue;
        const double term = binom_kj * falling(pos, j) * falling(neg, k - j) / denom;
        z += ((k - j) % 2 == 0) ? term : -term;
    }
    return z;
}

double ustat_kernel(const std::vector<int>& rs, int k) {
    std::int64_t pos = 0, neg = 0;
    for (int r : rs) {
        if (r == 1) ++pos;
        else if (r == -1) ++neg;
        else throw std::invalid_argument("ustat_kernel: outcomes must be +1 or -1");
    }
    return ustat_kernel(pos, neg, k);
}

namespace {

KindDiagnostics diagnostics_for(const LabelCounts& c, int k) {
    KindDiagnostics d;
    d.kind = pair_kind_name(c.kind);
    d.budget = c.budget;
    d.m = c.qualifying(k);
    d.min_t = c.min_tot();
    std::int64_t dropped = 0;
    for (std::int64_t t : c.tot)
        if (t > 0 && t < k) ++dropped;
    d.labels_dropped = dropped;
    return d;
}

double fhat_ustat(const LabelCounts& c, int k) {
    std::int64_t m = 0;
    double sum = 0.0;
    for (std::size_t l = 0; l < c.tot.size(); ++l) {
        if (c.tot[l] < k) continue;
        sum += ustat_kernel(c.pos[l], c.tot[l] - c.pos[l], k);
        ++m;
    }
    if (m == 0)
        throw EstimatorError(EstimatorError::Code::insufficient_collisions,
                             std::string("no label of kind ") + pair_kind_name(c.kind) +
                                 " reached " + std::to_string(k) + " samples",
                             pair_kind_name(c.kind));
    return sum / double(m);
}

double fhat_grand_mean(const LabelCounts& c) {
    if (c.budget == 0)
        throw EstimatorError(EstimatorError::Code::empty_batch,
                             std::string("empty batch of kind ") + pair_kind_name(c.kind),
                             pair_kind_name(c.kind));
    std::int64_t pos = 0;
    for (std::int64_t p : c.pos) pos += p;
    return double(2 * pos - c.budget) / double(c.budget);
}

double fhat_nonuniform(const LabelCounts& c, int k) {
    if (c.budget < k)
        throw EstimatorError(EstimatorError::Code::insufficient_collisions,
                             std::string("budget below k for kind ") + pair_kind_name(c.kind),
                             pair_kind_name(c.kind));
    const double m = double(c.budget);
    std::int64_t qualifying = 0;
    double sum = 0.0;
    for (std::size_t l = 0; l < c.tot.size(); ++l) {
        const std::int64_t t = c.tot[l];
        if (t < k) continue;
        ++qualifying;
        const double z = ustat_kernel(c.pos[l], t - c.pos[l], k);
        // C(T,k)/C(M,k) as a product of falling-factorial ratios
        double ratio = 1.0;
        for (int s = 0; s < k; ++s) ratio *= double(t - s) / (m - double(s));
        const double w_hat = double(t) / m;
        sum += ratio * z / std::pow(w_hat, double(k - 1));
    }
    if (qualifying == 0)
        throw EstimatorError(EstimatorError::Code::insufficient_collisions,
                             std::string("no label of kind ") + pair_kind_name(c.kind) +
                                 " reached " + std::to_string(k) + " samples",
                             pair_kind_name(c.kind));
    return sum;
}

// Per-label means clamped to [0,1]; coverage must be complete.
std::vector<double> xhat_full_coverage(const LabelCounts& c, const char* who) {
    std::int64_t missing = 0;
    std::string first;
    for (std::size_t l = 0; l < c.tot.size(); ++l) {
        if (c.tot[l] == 0) {
            if (missing == 0)
                first = "(" + std::to_string(l / std::size_t(c.n2)) + "," +
                        std::to_string(l % std::size_t(c.n2)) + ")";
            ++missing;
        }
    }
    if (missing > 0)
        throw EstimatorError(EstimatorError::Code::coverage_incomplete,
                             std::string(who) + ": coverage incomplete, " +
                                 std::to_string(missing) + " unobserved labels, first " +
                                 first,
                             pair_kind_name(c.kind), missing);
    std::vector<double> xhat(c.tot.size());
    for (std::size_t l = 0; l < c.tot.size(); ++l) {
        const double v = double(2 * c.pos[l] - c.tot[l]) / double(c.tot[l]);
        xhat[l] = std::clamp(v, 0.0, 1.0);
    }
    return xhat;
}

EstimateReport assemble_mmd(double f11, double f22, double f12, std::string metric,
                            const LabelCounts& c11, const LabelCounts& c12,
                            const LabelCounts& c22, int k) {
    EstimateReport r;
    r.estimate = f11 + f22 - 2.0 * f12;
    r.metric_id = std::move(metric);
    r.budget_used = c11.budget + c12.budget + c22.budget;
    r.per_kind = {diagnostics_for(c11, k), diagnostics_for(c12, k),
                  diagnostics_for(c22, k)};
    r.f11 = f11;
    r.f22 = f22;
    r.f12 = f12;
    return r;
}

}  // namespace

EstimateReport mmd_k_estimate(const LabelCounts& c11, const LabelCounts& c12,
                              const LabelCounts& c22, int k) {
    if (k < 1) throw std::invalid_argument("mmd_k_estimate: k must be >= 1");
    // kind order fixed so error attribution is deterministic
    const double f11 = fhat_ustat(c11, k);
    const double f22 = fhat_ustat(c22, k);
    const double f12 = fhat_ustat(c12, k);
    return assemble_mmd(f11, f22, f12, "mmd-" + std::to_string(k), c11, c12, c22, k);
}

EstimateReport mmd1_labelfree(const LabelCounts& c11, const LabelCounts& c12,
                              const LabelCounts& c22) {
    const double f11 = fhat_grand_mean(c11);
    const double f22 = fhat_grand_mean(c22);
    const double f12 = fhat_grand_mean(c12);
    EstimateReport r = assemble_mmd(f11, f22, f12, "mmd-1", c11, c12, c22, 1);
    r.metric_id = "mmd-1-labelfree";
    return r;
}

EstimateReport wasserstein_estimate(const LabelCounts& c12) {
    const std::vector<double> xhat = xhat_full_coverage(c12, "wasserstein_estimate");
    std::vector<double> cost(xhat.size());
    for (std::size_t l = 0; l < xhat.size(); ++l) cost[l] = 1.0 - xhat[l];
    const std::vector<double> p(std::size_t(c12.n1), 1.0 / double(c12.n1));
    const std::vector<double> q(std::size_t(c12.n2), 1.0 / double(c12.n2));
    const OtSolution sol = solve_ot(cost, c12.n1, c12.n2, p, q);

    EstimateReport r;
    r.estimate = sol.coupling.objective;
    r.metric_id = "wasserstein";
    r.budget_used = c12.budget;
    r.per_kind = {diagnostics_for(c12, 1)};
    r.coupling = sol.coupling;
    return r;
}

EstimateReport nonuniform_mmd_k_estimate(const LabelCounts& c11,
                                         const LabelCounts& c12,
                                         const LabelCounts& c22, int k) {
    if (k < 1) throw std::invalid_argument("nonuniform_mmd_k_estimate: k must be >= 1");
    const double f11 = fhat_nonuniform(c11, k);
    const double f22 = fhat_nonuniform(c22, k);
    const double f12 = fhat_nonuniform(c12, k);
    EstimateReport r = assemble_mmd(f11, f22, f12, "mmd-" + std::to_string(k), c11,
                                    c12, c22, k);
    r.metric_id = "mmd-" + std::to_string(k) + "-nonuniform";
    return r;
}

EstimateReport nonuniform_wasserstein_estimate(const LabelCounts& c12) {
    const std::vector<double> xhat =
        xhat_full_coverage(c12, "nonuniform_wasserstein_estimate");
    std::vector<double> cost(xhat.size());
    for (std::size_t l = 0; l < xhat.size(); ++l) cost[l] = 1.0 - xhat[l];

    std::vector<double> p(std::size_t(c12.n1), 0.0), q(std::size_t(c12.n2), 0.0);
    for (std::size_t l = 0; l < c12.tot.size(); ++l) {
        p[l / std::size_t(c12.n2)] += double(c12.tot[l]);
        q[l % std::size_t(c12.n2)] += double(c12.tot[l]);
    }
    for (double& x : p) x /= double(c12.budget);
    for (double& x : q) x /= double(c12.budget);

    const OtSolution sol = solve_ot(cost, c12.n1, c12.n2, p, q);
    EstimateReport r;
    r.estimate = sol.coupling.objective;
    r.metric_id = "wasserstein-nonuniform";
    r.budget_used = c12.budget;
    r.per_kind = {diagnostics_for(c12, 1)};
    r.coupling = sol.coupling;
    return r;
}

EstimateReport classical_mmd_k_estimate(const std::vector<ClassicalDraw>& d11,
                                        const std::vector<ClassicalDraw>& d12,
                                        const std::vector<ClassicalDraw>& d22,
                                        int k) {
    if (k < 1) throw std::invalid_argument("classical_mmd_k_estimate: k must be >= 1");
    auto mean_xk = [k](const std::vector<ClassicalDraw>& draws, const char* kind) {
        if (draws.empty())
            throw EstimatorError(EstimatorError::Code::empty_batch,
                                 std::string("empty classical batch of kind ") + kind,
                                 kind);
        double sum = 0.0;
        for (const ClassicalDraw& d : draws) {
            double pk = d.x;
            for (int s = 1; s < k; ++s) pk *= d.x;
            sum += pk;
        }
        return sum / double(draws.size());
    };
    const double f11 = mean_xk(d11, "11");
    const double f22 = mean_xk(d22, "22");
    const double f12 = mean_xk(d12, "12");

    EstimateReport r;
    r.estimate = f11 + f22 - 2.0 * f12;
    r.metric_id = "classical-mmd-" + std::to_string(k);
    r.budget_used = std::int64_t(d11.size() + d12.size() + d22.size());
    r.f11 = f11;
    r.f22 = f22;
    r.f12 = f12;
    return r;
}

}  // namespace qmetric

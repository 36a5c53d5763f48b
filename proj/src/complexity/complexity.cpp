#include "qmetric/complexity/complexity.hpp"

#include <cmath>
#include <stdexcept>

#include "qmetric/metrics/metrics.hpp"
#include "qmetric/parallel.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

// --- metric identifiers -------------------------------------------------------

std::string MetricId::name() const {
    switch (family) {
        case Family::mmd: return "mmd-" + std::to_string(k);
        case Family::mmd_labelfree: return "mmd-1-labelfree";
        case Family::wasserstein: return "wasserstein";
        case Family::classical_mmd: return "classical-mmd-" + std::to_string(k);
    }
    return "?";
}

std::optional<MetricId> MetricId::parse(const std::string& s) {
    if (s == "wasserstein") return MetricId{Family::wasserstein, 1};
    if (s == "mmd-1-labelfree") return MetricId{Family::mmd_labelfree, 1};
    auto tail_k = [&s](const std::string& prefix) -> std::optional<int> {
        if (s.rfind(prefix, 0) != 0) return std::nullopt;
        const std::string tail = s.substr(prefix.size());
        if (tail.empty()) return std::nullopt;
        for (char c : tail)
            if (c < '0' || c > '9') return std::nullopt;
        const int k = std::stoi(tail);
        return k >= 1 ? std::optional<int>(k) : std::nullopt;
    };
    if (auto k = tail_k("mmd-")) return MetricId{Family::mmd, *k};
    if (auto k = tail_k("classical-mmd-")) return MetricId{Family::classical_mmd, *k};
    return std::nullopt;
}

// --- analytic bounds ------------------------------------------------------------

std::int64_t hoeffding_bound_wasserstein(int n, double eps, double delta) {
    if (n < 1 || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("hoeffding_bound_wasserstein: bad parameters");
    const double n2 = double(n) * double(n);
    const double v =
        n2 * ((2.0 / (eps * eps)) * std::log(2.0 * n2 / delta) + std::log(n2 / delta));
    return std::int64_t(std::ceil(v));
}

namespace {

void check_bound_params(int n, int k, double eps, double delta) {
    if (n < 1 || k < 1 || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("mmd-k bound: bad parameters");
}

double log_factorial(int k) {
    double v = 0.0;
    for (int s = 2; s <= k; ++s) v += std::log(double(s));
    return v;
}

}  // namespace

std::int64_t mmd_k_bound_fixed_branch(int n, int k, double eps, double delta,
                                      double multiplier) {
    check_bound_params(n, k, eps, delta);
    const double base = std::exp(
        (log_factorial(k) + std::log(std::log(1.0 / delta)) - 2.0 * std::log(eps)) /
        double(k));
    const double v = multiplier * base * std::pow(double(n), 2.0 - 2.0 / double(k));
    return std::int64_t(std::ceil(v));
}

std::int64_t mmd_k_bound_general_branch(int n, int k, double eps, double delta) {
    check_bound_params(n, k, eps, delta);
    const double n2 = double(n) * double(n);
    const double a = double(k) / (eps * eps) * std::log(1.0 / delta);
    const double b = n2 * (std::log(n2 / delta) + double(k));
    return std::int64_t(std::ceil(std::max(a, b)));
}

std::int64_t hoeffding_bound_mmd_k(int n, int k, double eps, double delta,
                                   double multiplier) {
    check_bound_params(n, k, eps, delta);
    const double n2 = double(n) * double(n);
    const double premise = std::exp(log_factorial(k)) * std::log(1.0 / delta) /
                           (eps * eps);
    if (n2 >= premise) return mmd_k_bound_fixed_branch(n, k, eps, delta, multiplier);
    return mmd_k_bound_general_branch(n, k, eps, delta);
}

double expected_qualifying_labels(std::int64_t m, std::int64_t n, int k) {
    if (n < 1) throw std::invalid_argument("expected_qualifying_labels: n must be >= 1");
    if (k < 0) throw std::invalid_argument("expected_qualifying_labels: k must be >= 0");
    if (m < k) return 0.0;
    if (k == 0) return double(n);
    if (n == 1) return 1.0;

    // Pr[Bin(m, 1/n) >= k] via whichever tail is shorter, in log space.
    const double logp = -std::log(double(n));
    const double logq = std::log1p(-1.0 / double(n));
    auto log_pmf = [&](std::int64_t j) {
        return std::lgamma(double(m) + 1.0) - std::lgamma(double(j) + 1.0) -
               std::lgamma(double(m - j) + 1.0) + double(j) * logp +
               double(m - j) * logq;
    };
    const double mean = double(m) / double(n);
    double tail;
    if (double(k) <= mean || k <= 64) {
        // lower tail is short: Pr[>=k] = 1 - sum_{j<k}
        double acc = 0.0;
        for (std::int64_t j = 0; j < k; ++j) acc += std::exp(log_pmf(j));
        tail = 1.0 - acc;
        if (tail < 0.0) tail = 0.0;
    } else {
        // upper tail; terms decay geometrically past the mean
        double acc = 0.0;
        for (std::int64_t j = k; j <= m; ++j) {
            const double term = std::exp(log_pmf(j));
            acc += term;
            if (term < acc * 1e-18 && double(j) > mean) break;
        }
        tail = acc;
    }
    return double(n) * tail;
}

double expected_qualifying_labels_asymptotic(std::int64_t m, std::int64_t n, int k) {
    double log_kfac = 0.0;
    for (int s = 2; s <= k; ++s) log_kfac += std::log(double(s));
    const double v = double(k) * std::log(double(m)) - double(m) / double(n) -
                     log_kfac - double(k - 1) * std::log(double(n));
    return std::exp(v);
}

std::int64_t min_samples_for_occupancy(double t, std::int64_t n, double delta,
                                       double p_min) {
    if (!(t >= 0.0) || n < 1 || !(delta > 0.0 && delta < 1.0) || !(p_min > 0.0))
        throw std::invalid_argument("min_samples_for_occupancy: bad parameters");
    const double big_l = std::log(double(n) / delta);
    const double v = (t + big_l + std::sqrt(big_l * big_l + 2.0 * t * big_l)) / p_min;
    return std::int64_t(std::ceil(v));
}

// --- Algorithm-1 search -----------------------------------------------------------

namespace {

int count_successes(const std::function<bool(std::int64_t, std::uint64_t)>& probe,
                    std::int64_t m, int repetitions, std::uint64_t trial_seed,
                    int level) {
    int successes = 0;
    for (int r = 0; r < repetitions; ++r) {
        const std::uint64_t probe_seed =
            mix_seed(trial_seed, (std::uint64_t(level) << 32) | std::uint64_t(r));
        if (probe(m, probe_seed)) ++successes;
    }
    return successes;
}

}  // namespace

BisectOutcome bisect_min_samples(
    const std::function<bool(std::int64_t, std::uint64_t)>& probe, std::int64_t hi0,
    const ComplexityConfig& cfg, std::uint64_t trial_seed) {
    BisectOutcome out;
    std::int64_t lo = 0;
    std::int64_t hi = std::max<std::int64_t>(1, hi0);
    int level = 0;

    // Robust bracketing: make sure hi passes before bisecting.
    int j = 0;
    for (;;) {
        const int s = count_successes(probe, hi, cfg.repetitions, trial_seed, level++);
        const double p = double(s) / double(cfg.repetitions);
        if (p >= 1.0 - cfg.delta) {
            out.bracket_ok = true;
            break;
        }
        if (++j >= cfg.j_max) return out;  // flagged: no passing hi found
        hi *= 2;
    }

    while (hi - lo > std::max<std::int64_t>(100, hi / 50)) {
        const std::int64_t mid = (lo + hi) / 2;
        if (mid == 0) {
            lo = mid;
            continue;
        }
        const int s = count_successes(probe, mid, cfg.repetitions, trial_seed, level++);
        const double p = double(s) / double(cfg.repetitions);
        if (p >= 1.0 - cfg.delta)
            hi = mid;
        else
            lo = mid;
    }
    out.min_samples = hi;
    out.levels = level;
    return out;
}

// --- estimator probes ---------------------------------------------------------------

double exact_metric_value(const MetricId& metric, const Ensemble& e1,
                          const Ensemble& e2) {
    switch (metric.family) {
        case MetricId::Family::wasserstein:
            return wasserstein_exact(e1, e2).value;
        case MetricId::Family::mmd:
        case MetricId::Family::mmd_labelfree:
        case MetricId::Family::classical_mmd:
            return mmd_k_pairwise(e1, e2, metric.k).raw;
    }
    throw std::logic_error("exact_metric_value: unknown metric");
}

std::int64_t initial_hi(const MetricId& metric, int n, const ComplexityConfig& cfg) {
    std::int64_t hi = 1;
    switch (metric.family) {
        case MetricId::Family::wasserstein:
            hi = hoeffding_bound_wasserstein(n, cfg.eps, cfg.delta);
            break;
        case MetricId::Family::mmd:
        case MetricId::Family::mmd_labelfree:
            hi = hoeffding_bound_mmd_k(n, metric.k, cfg.eps, cfg.delta);
            break;
        case MetricId::Family::classical_mmd:
            hi = std::int64_t(
                std::ceil(3.0 * 8.0 / (cfg.eps * cfg.eps) * std::log(6.0 / cfg.delta)));
            break;
    }
    return std::max<std::int64_t>(1, std::int64_t(std::ceil(double(hi) * cfg.hi_multiplier)));
}

namespace {

// Cached per-trial sampling context: the cross-fidelity tables of each kind.
struct ProbeContext {
    MetricId metric;
    const Ensemble* e1;
    const Ensemble* e2;
    FidelityTable t11, t12, t22;
    std::vector<double> w1, w2;

    ProbeContext(const MetricId& m, const Ensemble& a, const Ensemble& b)
        : metric(m), e1(&a), e2(&b) {
        w1 = a.weights();
        w2 = b.weights();
        if (m.family == MetricId::Family::classical_mmd) return;  // oracle draws only
        t12 = cross_fidelities(a, b);
        if (m.family == MetricId::Family::mmd ||
            m.family == MetricId::Family::mmd_labelfree) {
            t11 = cross_fidelities(a, a);
            t22 = cross_fidelities(b, b);
        }
    }

    std::optional<double> estimate(std::int64_t m_budget, Rng& rng) const {
        try {
            switch (metric.family) {
                case MetricId::Family::wasserstein: {
                    LabelCounts c12 = draw_batch_counts(t12, w1, w2, PairKind::k12,
                                                        m_budget, rng);
                    if (c12.min_tot() == 0) return std::nullopt;  // coverage incomplete
                    return wasserstein_estimate(c12).estimate;
                }
                case MetricId::Family::mmd: {
                    const auto split = budget_split(m_budget);
                    LabelCounts c11 =
                        draw_batch_counts(t11, w1, w1, PairKind::k11, split[0], rng);
                    LabelCounts c12 =
                        draw_batch_counts(t12, w1, w2, PairKind::k12, split[1], rng);
                    LabelCounts c22 =
                        draw_batch_counts(t22, w2, w2, PairKind::k22, split[2], rng);
                    return mmd_k_estimate(c11, c12, c22, metric.k).estimate;
                }
                case MetricId::Family::mmd_labelfree: {
                    const auto split = budget_split(m_budget);
                    LabelCounts c11 =
                        draw_batch_counts(t11, w1, w1, PairKind::k11, split[0], rng);
                    LabelCounts c12 =
                        draw_batch_counts(t12, w1, w2, PairKind::k12, split[1], rng);
                    LabelCounts c22 =
                        draw_batch_counts(t22, w2, w2, PairKind::k22, split[2], rng);
                    return mmd1_labelfree(c11, c12, c22).estimate;
                }
                case MetricId::Family::classical_mmd: {
                    const auto split = budget_split(m_budget);
                    auto d11 = classical_oracle_batch(*e1, *e1, PairKind::k11, split[0],
                                                      rng, true);
                    auto d12 = classical_oracle_batch(*e1, *e2, PairKind::k12, split[1],
                                                      rng, true);
                    auto d22 = classical_oracle_batch(*e2, *e2, PairKind::k22, split[2],
                                                      rng, true);
                    return classical_mmd_k_estimate(d11, d12, d22, metric.k).estimate;
                }
            }
        } catch (const EstimatorError&) {
            return std::nullopt;  // undefined estimate counts as a failed probe
        }
        return std::nullopt;
    }
};

}  // namespace

std::optional<double> probe_estimate(const MetricId& metric, const Ensemble& e1,
                                     const Ensemble& e2, std::int64_t m, Rng& rng) {
    const ProbeContext ctx(metric, e1, e2);
    return ctx.estimate(m, rng);
}

TrialOutcome run_trial(const MetricId& metric, const EnsembleGenerator& gen1,
                       const EnsembleGenerator& gen2, int n,
                       const ComplexityConfig& cfg, int trial_index,
                       const EstimatorHook& hook) {
    const std::uint64_t trial_seed = mix_seed(cfg.seed, std::uint64_t(trial_index));
    Rng gen_rng(mix_seed(trial_seed, 0xE25EB1E5ULL));
    const Ensemble s1 = gen1(n, gen_rng);
    const Ensemble s2 = gen2(n, gen_rng);

    TrialOutcome out;
    out.d_true = exact_metric_value(metric, s1, s2);

    const ProbeContext ctx(metric, s1, s2);
    const double eps = cfg.eps;
    const double d_true = out.d_true;
    auto probe = [&](std::int64_t m, std::uint64_t seed) {
        Rng rng(seed);
        const std::optional<double> est =
            hook ? hook(s1, s2, m, rng) : ctx.estimate(m, rng);
        return est.has_value() && std::abs(*est - d_true) <= eps;
    };

    const BisectOutcome bo =
        bisect_min_samples(probe, initial_hi(metric, n, cfg), cfg, trial_seed);
    out.ok = bo.bracket_ok;
    out.min_samples = bo.min_samples;
    return out;
}

MinSamplesResult estimate_min_samples(const MetricId& metric,
                                      const EnsembleGenerator& gen1,
                                      const EnsembleGenerator& gen2, int n,
                                      const ComplexityConfig& cfg,
                                      const EstimatorHook& hook) {
    if (!(cfg.eps > 0.0) || !(cfg.delta > 0.0 && cfg.delta < 1.0) ||
        cfg.repetitions < 1 || cfg.trials < 1)
        throw std::invalid_argument("estimate_min_samples: bad configuration");

    MinSamplesResult result;
    result.trials.resize(std::size_t(cfg.trials));
    const int workers =
        cfg.workers > 0 ? cfg.workers : int(std::thread::hardware_concurrency());
    parallel_for(cfg.trials, workers, [&](std::int64_t t) {
        result.trials[std::size_t(t)] =
            run_trial(metric, gen1, gen2, n, cfg, int(t), hook);
    });

    double sum = 0.0, sum2 = 0.0;
    int ok = 0;
    for (const TrialOutcome& t : result.trials) {
        if (!t.ok) {
            ++result.failed;
            continue;
        }
        sum += double(t.min_samples);
        sum2 += double(t.min_samples) * double(t.min_samples);
        ++ok;
    }
    if (ok > 0) {
        result.mean = sum / ok;
        const double var = sum2 / ok - result.mean * result.mean;
        result.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return result;
}

// --- sweep and fit -------------------------------------------------------------------

FitResult fit_loglog(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_loglog: needs at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, m] : points) {
        if (!(n > 0.0) || !(m > 0.0))
            throw std::invalid_argument("fit_loglog: points must be positive");
        sx += std::log(n);
        sy += std::log(m);
    }
    const double mx = sx / double(points.size());
    const double my = sy / double(points.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, m] : points) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(m) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

ComplexityCurve sweep(const MetricId& metric, const EnsembleGenerator& gen1,
                      const EnsembleGenerator& gen2, const std::vector<int>& n_list,
                      const ComplexityConfig& cfg) {
    if (n_list.size() < 3) throw std::invalid_argument("sweep: needs >= 3 values of N");

    ComplexityCurve curve;
    curve.metric_id = metric.name();
    for (int n : n_list) {
        const ComplexityConfig point_cfg = config_for_point(cfg, n);
        ComplexityPoint point;
        point.n = n;
        point.result = estimate_min_samples(metric, gen1, gen2, n, point_cfg);
        if (point.result.failed == int(point.result.trials.size()))
            throw std::runtime_error("sweep: every trial failed at N = " +
                                     std::to_string(n));
        curve.points.push_back(std::move(point));
    }

    std::vector<std::pair<double, double>> pts;
    for (const ComplexityPoint& p : curve.points)
        pts.emplace_back(double(p.n), p.result.mean);
    curve.fit = fit_loglog(pts);
    return curve;
}

}  // namespace qmetric

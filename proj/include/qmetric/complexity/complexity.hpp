#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmetric/ensembles/ensemble.hpp"
#include "qmetric/estimators/estimators.hpp"

namespace qmetric {

// --- metric identifiers -------------------------------------------------------

struct MetricId {
    enum class Family { mmd, mmd_labelfree, wasserstein, classical_mmd } family;
    int k = 1;  // moment order for the mmd families

    std::string name() const;
    static std::optional<MetricId> parse(const std::string& s);
};

// --- analytic bound calculators ------------------------------------------------

// N^2 ((2/eps^2) log(2N^2/delta) + log(N^2/delta))
std::int64_t hoeffding_bound_wasserstein(int n, double eps, double delta);

// Fixed-k branch: multiplier * ((k!/eps^2) log(1/delta))^{1/k} * N^{2-2/k}.
std::int64_t mmd_k_bound_fixed_branch(int n, int k, double eps, double delta,
                                      double multiplier = 4.0);

// General-version branch: max{ (k/eps^2) log(1/delta), N^2 (log(N^2/delta) + k) }.
std::int64_t mmd_k_bound_general_branch(int n, int k, double eps, double delta);

// Picks the fixed-k branch when its premise N^2 >= (k!/eps^2) log(1/delta)
// holds, the general branch otherwise.
std::int64_t hoeffding_bound_mmd_k(int n, int k, double eps, double delta,
                                   double multiplier = 4.0);

// n * Pr[Bin(M, 1/n) >= k], evaluated by a stable log-space binomial tail.
double expected_qualifying_labels(std::int64_t m, std::int64_t n, int k);
// Theta(M^k e^{-M/n} / (k! n^{k-1})) companion value.
double expected_qualifying_labels_asymptotic(std::int64_t m, std::int64_t n, int k);

// (t + L + sqrt(L^2 + 2 t L)) / p_min with L = log(n/delta).
std::int64_t min_samples_for_occupancy(double t, std::int64_t n, double delta,
                                       double p_min);

// --- Algorithm-1 search ----------------------------------------------------------

struct ComplexityConfig {
    double eps = 0.1;
    double delta = 1.0 / 3.0;
    int repetitions = 30;  // K probes per level
    int trials = 20;       // T independent trials
    int j_max = 8;         // bracket doublings
    std::uint64_t seed = 0;
    int workers = 0;       // <= 0: hardware concurrency
    double hi_multiplier = 1.0;  // scales the analytic initial hi
};

struct TrialOutcome {
    std::int64_t min_samples = 0;
    double d_true = 0.0;
    bool ok = false;
};

struct MinSamplesResult {
    std::vector<TrialOutcome> trials;
    double mean = 0.0;
    double stddev = 0.0;
    int failed = 0;
};

// Success-probability bisection (Algorithm-1 control flow), separated from the
// estimator probes so it can be tested against synthetic oracles. `probe`
// receives the candidate M and a fresh derived seed; bracketing doubles hi
// until the pass rate over K probes reaches 1 - delta (at most j_max times),
// then bisection runs with the stopping rule hi - lo <= max(100, hi/50).
struct BisectOutcome {
    std::int64_t min_samples = 0;
    bool bracket_ok = false;
    int levels = 0;
};

BisectOutcome bisect_min_samples(
    const std::function<bool(std::int64_t, std::uint64_t)>& probe, std::int64_t hi0,
    const ComplexityConfig& cfg, std::uint64_t trial_seed);

using EnsembleGenerator = std::function<Ensemble(int, Rng&)>;

// Replaces the metric's built-in estimator as the probe: returns the estimate
// for a budget of M samples, or nullopt when the estimate is undefined on the
// drawn batch (which counts as a failed probe).
using EstimatorHook = std::function<std::optional<double>(
    const Ensemble&, const Ensemble&, std::int64_t, Rng&)>;

// Per trial: draw fresh N-state ensembles, compute the exact value, then run
// the bracketing/bisection search with the metric's estimator (or the hook)
// as the probe. Trials run in parallel with seeds derived from the trial index.
MinSamplesResult estimate_min_samples(const MetricId& metric,
                                      const EnsembleGenerator& gen1,
                                      const EnsembleGenerator& gen2, int n,
                                      const ComplexityConfig& cfg,
                                      const EstimatorHook& hook = {});

// --- sweep and fitting -----------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares of log M on log N; needs >= 3 strictly positive points.
FitResult fit_loglog(const std::vector<std::pair<double, double>>& points);

struct ComplexityPoint {
    int n = 0;
    MinSamplesResult result;
};

struct ComplexityCurve {
    std::string metric_id;
    std::vector<ComplexityPoint> points;
    FitResult fit;
};

ComplexityCurve sweep(const MetricId& metric, const EnsembleGenerator& gen1,
                      const EnsembleGenerator& gen2, const std::vector<int>& n_list,
                      const ComplexityConfig& cfg);

// Seed derivation shared by sweep() and resumable per-trial runs.
inline ComplexityConfig config_for_point(const ComplexityConfig& cfg, int n) {
    ComplexityConfig out = cfg;
    out.seed = mix_seed(cfg.seed, std::uint64_t(n));
    return out;
}

// --- probe plumbing (exposed for the CLI's resumable per-trial runs) -------------

double exact_metric_value(const MetricId& metric, const Ensemble& e1,
                          const Ensemble& e2);

std::int64_t initial_hi(const MetricId& metric, int n, const ComplexityConfig& cfg);

// One estimator probe: the estimate, or nullopt when the estimator is
// undefined on the drawn batch (counts as a failed probe).
std::optional<double> probe_estimate(const MetricId& metric, const Ensemble& e1,
                                     const Ensemble& e2, std::int64_t m,
                                     Rng& rng);

TrialOutcome run_trial(const MetricId& metric, const EnsembleGenerator& gen1,
                       const EnsembleGenerator& gen2, int n,
                       const ComplexityConfig& cfg, int trial_index,
                       const EstimatorHook& hook = {});

}  // namespace qmetric

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmetric/sampler/sampler.hpp"
#include "qmetric/transport/transport.hpp"

namespace qmetric {

// Estimation is impossible on this data (not "estimate = 0"): no label of
// some kind reached k samples, or a label needed for coverage was never
// observed.
class EstimatorError : public std::runtime_error {
  public:
    enum class Code { insufficient_collisions, coverage_incomplete, empty_batch };

    EstimatorError(Code code, std::string message, std::string kind = "",
                   std::int64_t missing = 0)
        : std::runtime_error(std::move(message)),
          code_(code),
          kind_(std::move(kind)),
          missing_(missing) {}

    Code code() const { return code_; }
    const std::string& kind() const { return kind_; }
    std::int64_t missing_labels() const { return missing_; }

  private:
    Code code_;
    std::string kind_;
    std::int64_t missing_;
};

struct KindDiagnostics {
    std::string kind;
    std::int64_t budget = 0;
    std::int64_t m = 0;              // qualifying labels
    std::int64_t min_t = 0;          // over the full label space
    std::int64_t labels_dropped = 0; // observed but below k
};

struct EstimateReport {
    double estimate = 0.0;
    std::string metric_id;
    std::int64_t budget_used = 0;
    std::vector<KindDiagnostics> per_kind;
    std::optional<double> f11, f22, f12;
    std::optional<Coupling> coupling;  // plug-in Wasserstein plan
};

// floor(M/3) to kinds 11 and 22, remainder to 12.
std::array<std::int64_t, 3> budget_split(std::int64_t m);

// Order-k U-statistic kernel from the +1/-1 multiset on one label, computed
// combinatorially from the counts a = #(+1), b = #(-1):
//   Z = sum_j C(a,j) C(b,k-j) (-1)^{k-j} / C(a+b, k),   |Z| <= 1, E[Z|X] = X^k.
double ustat_kernel(std::int64_t pos, std::int64_t neg, int k);
double ustat_kernel(const std::vector<int>& rs, int k);  // multiset overload

// Collision-averaged U-stat estimator: per kind, mean of Z_l over labels with
// T_l >= k; D = F11 + F22 - 2 F12.
EstimateReport mmd_k_estimate(const LabelCounts& c11, const LabelCounts& c12,
                              const LabelCounts& c22, int k);

// Label-free MMD-1: per kind, the grand mean of r.
EstimateReport mmd1_labelfree(const LabelCounts& c11, const LabelCounts& c12,
                              const LabelCounts& c22);

// Plug-in Wasserstein from a full-coverage kind-12 batch: per-label means
// clamped to [0,1], C = 1 - X, uniform marginals.
EstimateReport wasserstein_estimate(const LabelCounts& c12);

// Importance-corrected collision estimator for nonuniform ensembles:
//   F = C(M,k)^-1 sum_{T_l>=k} C(T_l,k) Z_l / (T_l/M)^{k-1}.
EstimateReport nonuniform_mmd_k_estimate(const LabelCounts& c11,
                                         const LabelCounts& c12,
                                         const LabelCounts& c22, int k);

// Plug-in Wasserstein with weights estimated from the observed index
// frequencies (p_i = row frequency, q_j = column frequency).
EstimateReport nonuniform_wasserstein_estimate(const LabelCounts& c12);

// Classical plug-in: per kind, the sample mean of x^k over oracle draws.
EstimateReport classical_mmd_k_estimate(const std::vector<ClassicalDraw>& d11,
                                        const std::vector<ClassicalDraw>& d12,
                                        const std::vector<ClassicalDraw>& d22,
                                        int k);

}  // namespace qmetric

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmetric/ensembles/ensemble.hpp"

namespace qmetric {

// Which pair of ensembles a sample compares: within the first (11), across
// (12), within the second (22). Within-ensemble kinds draw ordered pairs with
// replacement (i = j allowed).
enum class PairKind { k11, k12, k22 };

const char* pair_kind_name(PairKind k);                    // "11" | "12" | "22"
std::optional<PairKind> parse_pair_kind(const std::string& s);

// One SWAP-test outcome: R in {-1,+1} plus the label (i, j) it was drawn on.
struct SampleRecord {
    std::int8_t r;
    PairKind kind;
    std::int32_t i;
    std::int32_t j;
};

// Per-label outcome counts: everything any estimator consumes. T_l = tot,
// number of +1 outcomes = pos; sum(tot) = budget.
struct LabelCounts {
    PairKind kind = PairKind::k12;
    int n1 = 0;
    int n2 = 0;
    std::int64_t budget = 0;
    std::vector<std::int64_t> tot;
    std::vector<std::int64_t> pos;

    std::int64_t labels() const { return std::int64_t(n1) * n2; }
    std::int64_t qualifying(int k) const;   // #labels with T_l >= k
    std::int64_t min_tot() const;           // over the whole label space
};

// A batch of M independent SWAP-test records (order preserved for
// persistence/replay).
struct SampleBatch {
    PairKind kind = PairKind::k12;
    int n1 = 0;
    int n2 = 0;
    std::int64_t budget = 0;
    std::vector<SampleRecord> records;

    LabelCounts to_counts() const;
};

// Replace each drawn center by a fresh eps-ball member before the SWAP test
// (the label still refers to the center pair).
struct NoiseConfig {
    double eps_b = 0.0;
};

// Walker/Vose alias sampler for nonuniform label draws; deterministic
// construction order.
class AliasSampler {
  public:
    explicit AliasSampler(const std::vector<double>& weights);
    int draw(Rng& rng) const;

  private:
    std::vector<double> threshold_;
    std::vector<int> alias_;
    bool uniform_ = false;
};

// One SWAP-test sample between states drawn from the selected pair of
// ensembles: label with probability p_i*q_j, then r Bernoulli((1+X_l)/2).
SampleRecord draw_sample(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                         Rng& rng);

// M independent records; with noise configured, every drawn state is replaced
// by eps_ball_state(center, eps_b) before the Bernoulli.
SampleBatch draw_batch(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                       std::int64_t m, Rng& rng,
                       const std::optional<NoiseConfig>& noise = std::nullopt);

// Same channel drawn by a pool of workers over disjoint sub-budgets; worker w
// runs on the stream seeded with base_seed ^ w and the sub-batches are merged
// in worker order. Estimators depend only on per-label multisets, so the
// merge order never affects downstream results. workers == 1 reproduces
// draw_batch on the stream seeded with base_seed.
SampleBatch draw_batch_pooled(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                              std::int64_t m, std::uint64_t base_seed, int workers,
                              const std::optional<NoiseConfig>& noise = std::nullopt);

// Fast noiseless path: the per-label multiset of outcomes is drawn directly
// (multinomial label counts, then a conditional binomial per label). Same
// joint distribution of LabelCounts as draw_batch(...).to_counts() with no
// noise; estimators depend only on these counts.
LabelCounts draw_batch_counts(const FidelityTable& fidelities,
                              const std::vector<double>& wa,
                              const std::vector<double>& wb, PairKind kind,
                              std::int64_t m, Rng& rng);

LabelCounts draw_batch_counts(const Ensemble& e1, const Ensemble& e2,
                              PairKind kind, std::int64_t m, Rng& rng);

// Classical oracle: the exact fidelity for a drawn label. Requires basis
// ensembles (all cross fidelities in {0,1}) unless `force` is set.
struct ClassicalDraw {
    std::int32_t i;
    std::int32_t j;
    double x;
};

ClassicalDraw classical_oracle_draw(const Ensemble& e1, const Ensemble& e2,
                                    PairKind kind, Rng& rng, bool force = false);

std::vector<ClassicalDraw> classical_oracle_batch(const Ensemble& e1,
                                                  const Ensemble& e2,
                                                  PairKind kind, std::int64_t m,
                                                  Rng& rng, bool force = false);

}  // namespace qmetric

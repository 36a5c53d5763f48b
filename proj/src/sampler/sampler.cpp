#include "qmetric/sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmetric/parallel.hpp"

namespace qmetric {

const char* pair_kind_name(PairKind k) {
    switch (k) {
        case PairKind::k11: return "11";
        case PairKind::k12: return "12";
        case PairKind::k22: return "22";
    }
    return "?";
}

std::optional<PairKind> parse_pair_kind(const std::string& s) {
    if (s == "11") return PairKind::k11;
    if (s == "12") return PairKind::k12;
    if (s == "22") return PairKind::k22;
    return std::nullopt;
}

std::int64_t LabelCounts::qualifying(int k) const {
    std::int64_t m = 0;
    for (std::int64_t t : tot)
        if (t >= k) ++m;
    return m;
}

std::int64_t LabelCounts::min_tot() const {
    std::int64_t mn = budget;
    for (std::int64_t t : tot)
        if (t < mn) mn = t;
    return mn;
}

LabelCounts SampleBatch::to_counts() const {
    LabelCounts c;
    c.kind = kind;
    c.n1 = n1;
    c.n2 = n2;
    c.budget = budget;
    c.tot.assign(std::size_t(n1) * n2, 0);
    c.pos.assign(std::size_t(n1) * n2, 0);
    for (const SampleRecord& rec : records) {
        const std::size_t l = std::size_t(rec.i) * n2 + std::size_t(rec.j);
        ++c.tot[l];
        if (rec.r > 0) ++c.pos[l];
    }
    return c;
}

AliasSampler::AliasSampler(const std::vector<double>& weights) {
    const int n = int(weights.size());
    if (n == 0) throw std::invalid_argument("AliasSampler: empty weights");
    double sum = 0.0;
    bool all_equal = true;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("AliasSampler: negative weight");
        sum += w;
        if (w != weights.front()) all_equal = false;
    }
    if (sum <= 0.0) throw std::invalid_argument("AliasSampler: zero total weight");
    threshold_.assign(std::size_t(n), 1.0);
    alias_.assign(std::size_t(n), 0);
    if (all_equal) {
        uniform_ = true;
        return;
    }
    // Vose construction; stacks filled in index order for determinism.
    std::vector<double> scaled(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) scaled[std::size_t(i)] = weights[std::size_t(i)] * n / sum;
    std::vector<int> small, large;
    for (int i = n - 1; i >= 0; --i)
        (scaled[std::size_t(i)] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        const int s = small.back();
        small.pop_back();
        const int l = large.back();
        threshold_[std::size_t(s)] = scaled[std::size_t(s)];
        alias_[std::size_t(s)] = l;
        scaled[std::size_t(l)] -= 1.0 - scaled[std::size_t(s)];
        if (scaled[std::size_t(l)] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (int i : small) threshold_[std::size_t(i)] = 1.0;
    for (int i : large) threshold_[std::size_t(i)] = 1.0;
}

int AliasSampler::draw(Rng& rng) const {
    const int n = int(threshold_.size());
    const int slot = int(rng.below(std::uint64_t(n)));
    if (uniform_) return slot;
    return rng.uniform() < threshold_[std::size_t(slot)] ? slot
                                                         : alias_[std::size_t(slot)];
}

namespace {

struct KindView {
    const Ensemble* a;
    const Ensemble* b;
};

KindView select(const Ensemble& e1, const Ensemble& e2, PairKind kind) {
    if (e1.dim() != e2.dim())
        throw std::invalid_argument("sampler: ensemble dimensions differ");
    switch (kind) {
        case PairKind::k11: return {&e1, &e1};
        case PairKind::k22: return {&e2, &e2};
        default: return {&e1, &e2};
    }
}

}  // namespace

SampleRecord draw_sample(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                         Rng& rng) {
    const KindView v = select(e1, e2, kind);
    const AliasSampler pa(v.a->weights());
    const AliasSampler pb(v.b->weights());
    const int i = pa.draw(rng);
    const int j = pb.draw(rng);
    const double x = fidelity(v.a->entry(i).state, v.b->entry(j).state);
    const std::int8_t r = rng.bernoulli(0.5 * (1.0 + x)) ? std::int8_t(1) : std::int8_t(-1);
    return {r, kind, i, j};
}

SampleBatch draw_batch(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                       std::int64_t m, Rng& rng,
                       const std::optional<NoiseConfig>& noise) {
    if (m < 0) throw std::invalid_argument("draw_batch: budget must be >= 0");
    const KindView v = select(e1, e2, kind);
    SampleBatch batch;
    batch.kind = kind;
    batch.n1 = v.a->size();
    batch.n2 = v.b->size();
    batch.budget = m;
    batch.records.reserve(std::size_t(m));

    const AliasSampler pa(v.a->weights());
    const AliasSampler pb(v.b->weights());
    std::optional<FidelityTable> table;
    if (!noise) table = cross_fidelities(*v.a, *v.b);

    for (std::int64_t t = 0; t < m; ++t) {
        const int i = pa.draw(rng);
        const int j = pb.draw(rng);
        double x;
        if (noise) {
            // States collapse after each SWAP test: fresh ball members per draw.
            const PureState sa = eps_ball_state(v.a->entry(i).state, noise->eps_b, rng);
            const PureState sb = eps_ball_state(v.b->entry(j).state, noise->eps_b, rng);
            x = fidelity(sa, sb);
        } else {
            x = table->at(i, j);
        }
        const std::int8_t r =
            rng.bernoulli(0.5 * (1.0 + x)) ? std::int8_t(1) : std::int8_t(-1);
        batch.records.push_back({r, kind, i, j});
    }
    return batch;
}

SampleBatch draw_batch_pooled(const Ensemble& e1, const Ensemble& e2, PairKind kind,
                              std::int64_t m, std::uint64_t base_seed, int workers,
                              const std::optional<NoiseConfig>& noise) {
    if (workers < 1) workers = 1;
    if (std::int64_t(workers) > std::max<std::int64_t>(m, 1))
        workers = int(std::max<std::int64_t>(m, 1));

    std::vector<SampleBatch> parts(static_cast<std::size_t>(workers));
    const std::int64_t chunk = m / workers;
    const std::int64_t extra = m % workers;
    parallel_for(workers, workers, [&](std::int64_t w) {
        const std::int64_t sub = chunk + (w < extra ? 1 : 0);
        Rng rng(derive_seed(base_seed, std::uint64_t(w)));
        parts[std::size_t(w)] = draw_batch(e1, e2, kind, sub, rng, noise);
    });

    SampleBatch merged = std::move(parts.front());
    for (std::size_t w = 1; w < parts.size(); ++w) {
        merged.records.insert(merged.records.end(), parts[w].records.begin(),
                              parts[w].records.end());
        merged.budget += parts[w].budget;
    }
    return merged;
}

LabelCounts draw_batch_counts(const FidelityTable& fidelities,
                              const std::vector<double>& wa,
                              const std::vector<double>& wb, PairKind kind,
                              std::int64_t m, Rng& rng) {
    if (m < 0) throw std::invalid_argument("draw_batch_counts: budget must be >= 0");
    const int n1 = fidelities.rows, n2 = fidelities.cols;
    if (int(wa.size()) != n1 || int(wb.size()) != n2)
        throw std::invalid_argument("draw_batch_counts: weight shape mismatch");

    LabelCounts c;
    c.kind = kind;
    c.n1 = n1;
    c.n2 = n2;
    c.budget = m;
    c.tot.assign(std::size_t(n1) * n2, 0);
    c.pos.assign(std::size_t(n1) * n2, 0);

    // Multinomial label counts by sequential conditional binomials (row-major
    // label order), then the per-label +1 count. The final positive-weight
    // label absorbs the remaining budget so that sum(tot) = m exactly.
    const std::int64_t labels = c.labels();
    std::int64_t last_live = -1;
    for (std::int64_t l = labels - 1; l >= 0 && last_live < 0; --l)
        if (wa[std::size_t(l / n2)] * wb[std::size_t(l % n2)] > 0.0) last_live = l;
    if (last_live < 0 && m > 0)
        throw std::invalid_argument("draw_batch_counts: all label weights are zero");

    std::int64_t remaining = m;
    double rest = 1.0;
    for (std::int64_t l = 0; l < labels && remaining > 0; ++l) {
        const double w = wa[std::size_t(l / n2)] * wb[std::size_t(l % n2)];
        std::int64_t t;
        if (l == last_live) {
            t = remaining;
        } else {
            double pc = w / rest;
            if (pc > 1.0) pc = 1.0;
            t = pc > 0.0 ? rng.binomial(remaining, pc) : 0;
        }
        rest -= w;
        if (t == 0) continue;
        c.tot[std::size_t(l)] = t;
        // fidelities can sit a rounding error outside [0,1]
        const double ps =
            std::clamp(0.5 * (1.0 + fidelities.values[std::size_t(l)]), 0.0, 1.0);
        c.pos[std::size_t(l)] = rng.binomial(t, ps);
        remaining -= t;
    }
    return c;
}

LabelCounts draw_batch_counts(const Ensemble& e1, const Ensemble& e2,
                              PairKind kind, std::int64_t m, Rng& rng) {
    const KindView v = select(e1, e2, kind);
    const FidelityTable t = cross_fidelities(*v.a, *v.b);
    return draw_batch_counts(t, v.a->weights(), v.b->weights(), kind, m, rng);
}

namespace {

bool is_basis_like(const Ensemble& e) {
    for (const auto& entry : e.entries()) {
        int nonzero = 0;
        for (const cplx& a : entry.state.amplitudes()) {
            if (std::abs(a) > 1e-12) ++nonzero;
            if (nonzero > 1) return false;
        }
    }
    return true;
}

}  // namespace

ClassicalDraw classical_oracle_draw(const Ensemble& e1, const Ensemble& e2,
                                    PairKind kind, Rng& rng, bool force) {
    const KindView v = select(e1, e2, kind);
    if (!force && (!is_basis_like(*v.a) || !is_basis_like(*v.b)))
        throw std::invalid_argument(
            "classical_oracle_draw: non-basis ensembles require the force flag");
    const AliasSampler pa(v.a->weights());
    const AliasSampler pb(v.b->weights());
    const int i = pa.draw(rng);
    const int j = pb.draw(rng);
    return {i, j, fidelity(v.a->entry(i).state, v.b->entry(j).state)};
}

std::vector<ClassicalDraw> classical_oracle_batch(const Ensemble& e1,
                                                  const Ensemble& e2,
                                                  PairKind kind, std::int64_t m,
                                                  Rng& rng, bool force) {
    const KindView v = select(e1, e2, kind);
    if (!force && (!is_basis_like(*v.a) || !is_basis_like(*v.b)))
        throw std::invalid_argument(
            "classical_oracle_batch: non-basis ensembles require the force flag");
    const AliasSampler pa(v.a->weights());
    const AliasSampler pb(v.b->weights());

    // For basis-like ensembles the fidelity is a sparse lookup; avoid the
    // dense table (dimension can be large in the classical-limit checks).
    std::vector<int> sup_a, sup_b;
    const bool sparse = is_basis_like(*v.a) && is_basis_like(*v.b);
    if (sparse) {
        auto support = [](const Ensemble& e) {
            std::vector<int> s;
            s.reserve(std::size_t(e.size()));
            for (const auto& entry : e.entries()) {
                int idx = 0;
                for (int t = 0; t < entry.state.dim(); ++t)
                    if (std::abs(entry.state.data()[t]) > 1e-12) idx = t;
                s.push_back(idx);
            }
            return s;
        };
        sup_a = support(*v.a);
        sup_b = support(*v.b);
    }

    std::vector<ClassicalDraw> out;
    out.reserve(std::size_t(m));
    for (std::int64_t t = 0; t < m; ++t) {
        const int i = pa.draw(rng);
        const int j = pb.draw(rng);
        double x;
        if (sparse)
            x = sup_a[std::size_t(i)] == sup_b[std::size_t(j)] ? 1.0 : 0.0;
        else
            x = fidelity(v.a->entry(i).state, v.b->entry(j).state);
        out.push_back({i, j, x});
    }
    return out;
}

}  // namespace qmetric

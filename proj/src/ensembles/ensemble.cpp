#include "qmetric/ensembles/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "qmetric/kernels/kernels.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

namespace {

constexpr int kResampleLimit = 100;

bool collides(const PureState& s, const std::vector<Ensemble::Entry>& accepted) {
    for (const auto& e : accepted)
        if (fidelity(s, e.state) >= 1.0 - tols().distinct_fidelity) return true;
    return false;
}

// Draw states from `make` until distinct from everything accepted so far;
// generators with continuous output collide with probability zero, so hitting
// the limit means the parameters force a collision (e.g. cluster with s = 0).
template <typename F>
Ensemble build_uniform(int n, const char* kind, F&& make) {
    if (n < 1) throw std::invalid_argument(std::string(kind) + ": n must be >= 1");
    std::vector<Ensemble::Entry> entries;
    entries.reserve(std::size_t(n));
    const double w = 1.0 / double(n);
    for (int i = 0; i < n; ++i) {
        int attempts = 0;
        for (;;) {
            PureState s = make();
            if (!collides(s, entries)) {
                entries.push_back({w, std::move(s)});
                break;
            }
            if (++attempts >= kResampleLimit)
                throw std::runtime_error(std::string(kind) +
                                         ": could not draw distinct states");
        }
    }
    return Ensemble(std::move(entries), kind);
}

}  // namespace

Ensemble::Ensemble(std::vector<Entry> entries, std::string kind)
    : entries_(std::move(entries)), kind_(std::move(kind)) {
    if (entries_.empty()) throw std::invalid_argument("Ensemble: empty");
    const int d = entries_.front().state.dim();
    double sum = 0.0;
    for (const auto& e : entries_) {
        if (e.state.dim() != d) throw std::invalid_argument("Ensemble: mixed dimensions");
        if (!(e.weight > 0.0)) throw std::invalid_argument("Ensemble: weights must be positive");
        sum += e.weight;
    }
    if (std::abs(sum - 1.0) > tols().weight_sum)
        throw std::invalid_argument("Ensemble: weights must sum to 1");
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (std::size_t j = i + 1; j < entries_.size(); ++j)
            if (fidelity(entries_[i].state, entries_[j].state) >=
                1.0 - tols().distinct_fidelity)
                throw std::invalid_argument("Ensemble: states must be pairwise distinct");
}

std::vector<double> Ensemble::weights() const {
    std::vector<double> w;
    w.reserve(entries_.size());
    for (const auto& e : entries_) w.push_back(e.weight);
    return w;
}

std::vector<cplx> Ensemble::packed_states() const {
    const std::size_t d = std::size_t(dim());
    std::vector<cplx> flat(entries_.size() * d);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (std::size_t a = 0; a < d; ++a)
            flat[i * d + a] = entries_[i].state.data()[a];
    return flat;
}

Ensemble Ensemble::permuted(const std::vector<int>& order) const {
    if (order.size() != entries_.size())
        throw std::invalid_argument("Ensemble::permuted: bad permutation size");
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (int idx : order) out.push_back(entries_[std::size_t(idx)]);
    return Ensemble(std::move(out), kind_);
}

FidelityTable cross_fidelities(const Ensemble& a, const Ensemble& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("cross_fidelities: dimension mismatch");
    FidelityTable t;
    t.rows = a.size();
    t.cols = b.size();
    t.values.resize(std::size_t(t.rows) * t.cols);
    const auto pa = a.packed_states();
    const auto pb = b.packed_states();
    kernels::fidelity_table(pa.data(), std::size_t(t.rows), pb.data(),
                            std::size_t(t.cols), std::size_t(a.dim()),
                            t.values.data());
    return t;
}

Ensemble cluster_ensemble(int n, double s, Rng& rng) {
    return build_uniform(n, "cluster", [&] {
        const cplx c(rng.normal(), rng.normal());
        std::vector<cplx> v{cplx(1.0, 0.0), s * c};
        return PureState(std::move(v), true);
    });
}

Ensemble circular_ensemble(int n, Rng& rng) {
    return build_uniform(n, "circular", [&] {
        const double theta = 6.283185307179586476925286766559 * rng.uniform();
        std::vector<cplx> v{cplx(std::cos(theta), 0.0), cplx(std::sin(theta), 0.0)};
        return PureState(std::move(v));
    });
}

Ensemble hard_pair(int n, double theta) {
    if (n < 2) throw std::invalid_argument("hard_pair: n must be >= 2");
    std::vector<Ensemble::Entry> entries;
    entries.reserve(std::size_t(n));
    const double w = 1.0 / double(n);
    const double inv_sqrt2 = 0.70710678118654752440;
    for (int l = 0; l < n; ++l) {
        const double phase = theta + 6.283185307179586476925286766559 * double(l) / double(n);
        std::vector<cplx> v{cplx(inv_sqrt2, 0.0),
                            inv_sqrt2 * cplx(std::cos(phase), std::sin(phase))};
        entries.push_back({w, PureState(std::move(v))});
    }
    return Ensemble(std::move(entries), "hardpair");
}

Ensemble basis_ensemble(const std::vector<double>& weights, int d) {
    if (int(weights.size()) != d)
        throw std::invalid_argument("basis_ensemble: weight vector must have length d");
    std::vector<Ensemble::Entry> entries;
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        if (weights[std::size_t(i)] < 0.0)
            throw std::invalid_argument("basis_ensemble: negative weight");
        if (weights[std::size_t(i)] == 0.0) continue;  // dropped
        entries.push_back({weights[std::size_t(i)], PureState::basis(d, i)});
        sum += weights[std::size_t(i)];
    }
    if (entries.empty()) throw std::invalid_argument("basis_ensemble: all weights zero");
    if (std::abs(sum - 1.0) > tols().weight_sum)
        throw std::invalid_argument("basis_ensemble: weights must sum to 1");
    return Ensemble(std::move(entries), "basis");
}

Ensemble haar_ensemble(int n, int d, Rng& rng) {
    return build_uniform(n, "haar", [&] { return haar_state(d, rng); });
}

std::pair<Ensemble, Ensemble> from_fidelity_table(const FidelityTable& table) {
    const int n = table.rows;
    if (n < 1 || table.cols != n)
        throw std::invalid_argument("from_fidelity_table: table must be square");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = table.at(i, j);
            if (!(x >= 0.0 && x < 1.0 / double(n)))
                throw std::invalid_argument(
                    "from_fidelity_table: entry (" + std::to_string(i) + "," +
                    std::to_string(j) + ") violates 0 <= X < 1/N");
        }

    const int d = 2 * n;
    const double w = 1.0 / double(n);
    std::vector<Ensemble::Entry> psis, phis;
    for (int i = 0; i < n; ++i) psis.push_back({w, PureState::basis(d, i)});
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> v(std::size_t(d), cplx(0.0, 0.0));
        double col = 0.0;
        for (int i = 0; i < n; ++i) {
            v[std::size_t(i)] = cplx(std::sqrt(table.at(i, j)), 0.0);
            col += table.at(i, j);
        }
        v[std::size_t(n + j)] = cplx(std::sqrt(1.0 - col), 0.0);
        phis.push_back({w, PureState(std::move(v))});
    }
    return {Ensemble(std::move(psis), "fidelity-table-row"),
            Ensemble(std::move(phis), "fidelity-table-col")};
}

}  // namespace qmetric

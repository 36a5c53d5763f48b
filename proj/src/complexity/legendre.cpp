#include "qmetric/complexity/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace qmetric {

double legendre_p(int k, double t) {
    if (k < 0) throw std::invalid_argument("legendre_p: k must be >= 0");
    if (k == 0) return 1.0;
    double pm = 1.0, pc = t;
    for (int n = 1; n < k; ++n) {
        const double pn = (double(2 * n + 1) * t * pc - double(n) * pm) / double(n + 1);
        pm = pc;
        pc = pn;
    }
    return pc;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(std::size_t(n), 0.0);
    weights.assign(std::size_t(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-style initial guess, then Newton on P_n.
        double z = std::cos(3.141592653589793238462643383279 * (double(i) + 0.75) /
                            (double(n) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = (double(2 * j + 1) * z * p2 - double(j) * p3) / double(j + 1);
            }
            pp = double(n) * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        nodes[std::size_t(i)] = -z;
        nodes[std::size_t(n - 1 - i)] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[std::size_t(i)] = w;
        weights[std::size_t(n - 1 - i)] = w;
    }
}

namespace {

constexpr int kQuadNodes = 64;

struct Quad {
    std::vector<double> x, w;
    Quad() { gauss_legendre(kQuadNodes, x, w); }
};

const Quad& quad() {
    static const Quad q;
    return q;
}

}  // namespace

double MomentMatchedPair::density0(double x) const {
    return (x >= 0.0 && x <= a) ? 1.0 / a : 0.0;
}

double MomentMatchedPair::density1(double x) const {
    if (!(x >= 0.0 && x <= a)) return 0.0;
    return (1.0 + eta * legendre_p(k, 2.0 * x / a - 1.0)) / a;
}

double MomentMatchedPair::cdf1(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= a) return 1.0;
    const double t = 2.0 * x / a - 1.0;
    // integral of P_k: (P_{k+1} - P_{k-1}) / (2k+1); P_{-1} := P_0 convention
    // never arises since k >= 1.
    const double ip =
        (legendre_p(k + 1, t) - legendre_p(k - 1, t)) / double(2 * k + 1);
    return 0.5 * (t + 1.0) + 0.5 * eta * ip;
}

double MomentMatchedPair::sample0(Rng& rng) const { return a * rng.uniform(); }

double MomentMatchedPair::sample1(Rng& rng) const {
    const double u = rng.uniform();
    double lo = 0.0, hi = a;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf1(mid) < u)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= a * 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

namespace {

double moment_by_quadrature(const MomentMatchedPair& mm, int r, bool first) {
    // map [-1,1] -> [0,a]
    const Quad& q = quad();
    double acc = 0.0;
    for (int i = 0; i < kQuadNodes; ++i) {
        const double x = 0.5 * mm.a * (q.x[std::size_t(i)] + 1.0);
        double xr = 1.0;
        for (int s = 0; s < r; ++s) xr *= x;
        const double f = first ? mm.density1(x) : mm.density0(x);
        acc += q.w[std::size_t(i)] * xr * f;
    }
    return 0.5 * mm.a * acc;
}

}  // namespace

double MomentMatchedPair::moment0(int r) const { return moment_by_quadrature(*this, r, false); }
double MomentMatchedPair::moment1(int r) const { return moment_by_quadrature(*this, r, true); }

double MomentMatchedPair::delta_k_quadrature() const {
    return std::abs(moment1(k) - moment0(k));
}

double MomentMatchedPair::delta_k_exact() const {
    // |eta| * a^k * (k!)^2 / (2k+1)!  from int_{-1}^{1} (1+t)^k P_k(t) dt
    //                                     = 2^{k+1} (k!)^2 / (2k+1)!.
    double v = std::abs(eta);
    for (int s = 0; s < k; ++s) v *= a;
    for (int s = 1; s <= k; ++s) v *= double(s) / double(k + s);  // (k!)^2/(2k)!
    return v / double(2 * k + 1);
}

double MomentMatchedPair::delta_k_asymptotic() const {
    double v = std::abs(eta);
    for (int s = 1; s <= k; ++s) v *= double(s);
    for (int s = 0; s < k; ++s) v *= a / double(k);
    return v;
}

MomentMatchedPair moment_matched_pair(int k, double eta, double alpha, int n_states) {
    if (k < 1) throw std::invalid_argument("moment_matched_pair: k must be >= 1");
    if (!(std::abs(eta) <= 1.0))
        throw std::invalid_argument("moment_matched_pair: |eta| must be <= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("moment_matched_pair: alpha must be in (0,1)");
    if (n_states < 1) throw std::invalid_argument("moment_matched_pair: N must be >= 1");
    MomentMatchedPair mm;
    mm.k = k;
    mm.eta = eta;
    mm.alpha = alpha;
    mm.n_states = n_states;
    mm.a = alpha / double(n_states);
    return mm;
}

LowerBoundInstance lower_bound_instance(int k, double eta, double alpha, int n_states,
                                        Rng& rng) {
    const MomentMatchedPair densities = moment_matched_pair(k, eta, alpha, n_states);

    auto draw_table = [&](bool h1) {
        FidelityTable t;
        t.rows = t.cols = n_states;
        t.values.resize(std::size_t(n_states) * n_states);
        for (double& v : t.values)
            v = h1 ? densities.sample1(rng) : densities.sample0(rng);
        return t;
    };
    FidelityTable table0 = draw_table(false);
    FidelityTable table1 = draw_table(true);
    auto h0 = from_fidelity_table(table0);
    auto h1 = from_fidelity_table(table1);
    return {densities, std::move(h0), std::move(h1), std::move(table0),
            std::move(table1)};
}

}  // namespace qmetric

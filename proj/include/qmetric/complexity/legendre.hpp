#pragma once

#include <utility>
#include <vector>

#include "qmetric/ensembles/ensemble.hpp"

namespace qmetric {

// Legendre polynomial P_k on [-1, 1] (three-term recurrence).
double legendre_p(int k, double t);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]
// (Newton iteration on P_n); exact for polynomials of degree <= 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Moment-matched density pair on [0, a], a = alpha/N:
//   f0 = uniform,   f1 = (1 + eta * P_k(2x/a - 1)) / a.
// Moments 0..k-1 agree; the k-th moments differ by Delta_k.
struct MomentMatchedPair {
    int k = 0;
    double eta = 0.0;
    double alpha = 0.0;
    int n_states = 0;
    double a = 0.0;  // support upper bound alpha / N

    double density0(double x) const;
    double density1(double x) const;
    double cdf1(double x) const;

    double sample0(Rng& rng) const;  // uniform on [0, a]
    double sample1(Rng& rng) const;  // inverse-CDF draw from f1

    // r-th raw moments by 64-node Gauss-Legendre quadrature.
    double moment0(int r) const;
    double moment1(int r) const;

    double delta_k_quadrature() const;  // |moment1(k) - moment0(k)|
    double delta_k_exact() const;       // eta * a^k * (k!)^2 / (2k+1)!
    double delta_k_asymptotic() const;  // eta * k! * (a/k)^k, large-k simplification
};

MomentMatchedPair moment_matched_pair(int k, double eta, double alpha, int n_states);

// Lower-bound hard instances: draw an N x N fidelity table i.i.d. from f0
// (hypothesis H0) and from f1 (H1), realize each via from_fidelity_table.
struct LowerBoundInstance {
    MomentMatchedPair densities;
    std::pair<Ensemble, Ensemble> h0;
    std::pair<Ensemble, Ensemble> h1;
    FidelityTable table0;
    FidelityTable table1;
};

LowerBoundInstance lower_bound_instance(int k, double eta, double alpha, int n_states,
                                        Rng& rng);

}  // namespace qmetric

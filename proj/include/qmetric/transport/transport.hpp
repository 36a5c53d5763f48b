#pragma once

#include <vector>

namespace qmetric {

// Primal plan for the discrete optimal-transport LP
//   min <P, C>  s.t.  P 1 = p,  P^T 1 = q,  P >= 0.
struct Coupling {
    int n1 = 0;
    int n2 = 0;
    std::vector<double> plan;  // row-major n1 x n2
    double objective = 0.0;

    double at(int i, int j) const { return plan[std::size_t(i) * n2 + j]; }
};

// Dual potentials certifying the plan: u_i + v_j <= C_ij, and
// u.p + v.q equals the objective at optimality.
struct DualPair {
    std::vector<double> u;
    std::vector<double> v;
};

struct OtSolution {
    Coupling coupling;
    DualPair duals;
    int pivots = 0;
};

// Exact solver by the transportation simplex (min-cost flow on the bipartite
// graph): north-west-corner start, Dantzig entering rule with lowest-(i,j)
// tie-break, lexicographic supply perturbation removed at extraction, Bland's
// rule as the anti-cycling backstop. Costs must be finite; marginals
// nonnegative with equal sums (within 1e-9).
OtSolution solve_ot(const std::vector<double>& cost, int n1, int n2,
                    const std::vector<double>& p, const std::vector<double>& q);

}  // namespace qmetric

#include "qmetric/transport/transport.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qmetric/kernels/kernels.hpp"
#include "qmetric/tolerances.hpp"

namespace qmetric {

namespace {

constexpr double kPerturb = 1e-12;   // lexicographic supply perturbation unit
constexpr double kRcTol = 1e-12;     // entering-arc threshold on reduced cost

struct Cell {
    int i, j;
    double flow;
};

// Spanning-tree basis over n1 row nodes and n2 column nodes. Adjacency is
// rebuilt per pivot; the basis stays at n1 + n2 - 1 cells throughout.
struct Basis {
    int n1, n2;
    std::vector<Cell> cells;
    std::vector<std::vector<int>> adj;  // node -> incident cell ids

    int nodes() const { return n1 + n2; }
    int row_node(int i) const { return i; }
    int col_node(int j) const { return n1 + j; }

    void rebuild_adjacency() {
        adj.assign(std::size_t(nodes()), {});
        for (int b = 0; b < int(cells.size()); ++b) {
            adj[std::size_t(row_node(cells[std::size_t(b)].i))].push_back(b);
            adj[std::size_t(col_node(cells[std::size_t(b)].j))].push_back(b);
        }
    }

    int other_end(int cell_id, int node) const {
        const Cell& c = cells[std::size_t(cell_id)];
        const int rn = row_node(c.i), cn = col_node(c.j);
        return node == rn ? cn : rn;
    }
};

void compute_duals(const Basis& basis, const std::vector<double>& cost, int n2,
                   std::vector<double>& u, std::vector<double>& v) {
    const int nodes = basis.nodes();
    std::vector<char> seen(std::size_t(nodes), 0);
    std::vector<int> stack{0};
    u[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        for (int b : basis.adj[std::size_t(node)]) {
            const int next = basis.other_end(b, node);
            if (seen[std::size_t(next)]) continue;
            seen[std::size_t(next)] = 1;
            const Cell& c = basis.cells[std::size_t(b)];
            const double cij = cost[std::size_t(c.i) * n2 + c.j];
            if (next >= basis.n1)
                v[std::size_t(next - basis.n1)] = cij - u[std::size_t(c.i)];
            else
                u[std::size_t(next)] = cij - v[std::size_t(c.j)];
            stack.push_back(next);
        }
    }
}

// Tree path between two nodes as a list of cell ids.
std::vector<int> tree_path(const Basis& basis, int from, int to) {
    const int nodes = basis.nodes();
    std::vector<int> via_cell(std::size_t(nodes), -1);
    std::vector<int> parent(std::size_t(nodes), -1);
    std::vector<char> seen(std::size_t(nodes), 0);
    std::vector<int> stack{from};
    seen[std::size_t(from)] = 1;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node == to) break;
        for (int b : basis.adj[std::size_t(node)]) {
            const int next = basis.other_end(b, node);
            if (seen[std::size_t(next)]) continue;
            seen[std::size_t(next)] = 1;
            parent[std::size_t(next)] = node;
            via_cell[std::size_t(next)] = b;
            stack.push_back(next);
        }
    }
    std::vector<int> path;
    for (int node = to; node != from; node = parent[std::size_t(node)])
        path.push_back(via_cell[std::size_t(node)]);
    // path is ordered from `to` back to `from`; reverse to start at `from`
    for (std::size_t a = 0, b = path.size(); a + 1 < b; ++a, --b)
        std::swap(path[a], path[b - 1]);
    return path;
}

// North-west-corner initial basic solution (supplies/demands pre-perturbed so
// only the final cell exhausts both sides).
std::vector<Cell> northwest_corner(const std::vector<double>& p,
                                   const std::vector<double>& q) {
    const int n1 = int(p.size()), n2 = int(q.size());
    std::vector<Cell> cells;
    cells.reserve(std::size_t(n1 + n2 - 1));
    std::vector<double> supply(p), demand(q);
    int i = 0, j = 0;
    while (true) {
        const double f = std::min(supply[std::size_t(i)], demand[std::size_t(j)]);
        cells.push_back({i, j, f});
        supply[std::size_t(i)] -= f;
        demand[std::size_t(j)] -= f;
        if (i == n1 - 1 && j == n2 - 1) break;
        if (supply[std::size_t(i)] <= demand[std::size_t(j)] && i < n1 - 1)
            ++i;
        else if (j < n2 - 1)
            ++j;
        else
            ++i;
    }
    return cells;
}

// Re-solve the tree flows against the unperturbed marginals by leaf elimination.
void extract_exact_flows(Basis& basis, const std::vector<double>& p,
                         const std::vector<double>& q) {
    const int nodes = basis.nodes();
    std::vector<double> balance(static_cast<std::size_t>(nodes));
    for (int i = 0; i < basis.n1; ++i) balance[std::size_t(i)] = p[std::size_t(i)];
    for (int j = 0; j < basis.n2; ++j)
        balance[std::size_t(basis.n1 + j)] = q[std::size_t(j)];

    basis.rebuild_adjacency();
    std::vector<int> degree(static_cast<std::size_t>(nodes));
    std::vector<char> cell_done(basis.cells.size(), 0);
    std::vector<int> queue;
    for (int node = 0; node < nodes; ++node) {
        degree[std::size_t(node)] = int(basis.adj[std::size_t(node)].size());
        if (degree[std::size_t(node)] == 1) queue.push_back(node);
    }
    while (!queue.empty()) {
        const int node = queue.back();
        queue.pop_back();
        int live = -1;
        for (int b : basis.adj[std::size_t(node)])
            if (!cell_done[std::size_t(b)]) live = b;
        if (live < 0) continue;  // root of the elimination
        Cell& c = basis.cells[std::size_t(live)];
        c.flow = balance[std::size_t(node)];
        cell_done[std::size_t(live)] = 1;
        const int next = basis.other_end(live, node);
        balance[std::size_t(next)] -= c.flow;
        balance[std::size_t(node)] = 0.0;
        if (--degree[std::size_t(next)] == 1) queue.push_back(next);
        degree[std::size_t(node)] = 0;
    }
}

}  // namespace

OtSolution solve_ot(const std::vector<double>& cost, int n1, int n2,
                    const std::vector<double>& p, const std::vector<double>& q) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("solve_ot: empty marginals");
    if (int(p.size()) != n1 || int(q.size()) != n2 || int(cost.size()) != n1 * n2)
        throw std::invalid_argument("solve_ot: shape mismatch");
    double sp = 0.0, sq = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw std::invalid_argument("solve_ot: negative supply");
        sp += x;
    }
    for (double x : q) {
        if (!(x >= 0.0)) throw std::invalid_argument("solve_ot: negative demand");
        sq += x;
    }
    if (std::abs(sp - sq) > tols().marginal)
        throw std::invalid_argument("solve_ot: marginal sums differ");
    for (double c : cost)
        if (!std::isfinite(c)) throw std::invalid_argument("solve_ot: cost must be finite");

    // Lexicographic perturbation, balanced on the last demand; removed at
    // extraction.
    std::vector<double> pp(p), qq(q);
    double extra = 0.0;
    for (int i = 0; i < n1; ++i) {
        pp[std::size_t(i)] += double(i + 1) * kPerturb;
        extra += double(i + 1) * kPerturb;
    }
    qq[std::size_t(n2 - 1)] += extra;

    Basis basis{n1, n2, northwest_corner(pp, qq), {}};

    std::vector<double> u(static_cast<std::size_t>(n1)), v(static_cast<std::size_t>(n2));
    const int max_pivots = 2000 + 40 * (n1 + n2) * (n1 + n2);
    const int stall_limit = 8 * (n1 + n2);
    int pivots = 0;
    int stall = 0;
    bool bland = false;

    while (true) {
        basis.rebuild_adjacency();
        compute_duals(basis, cost, n2, u, v);

        int ei = -1, ej = -1;
        if (!bland) {
            std::size_t idx = 0;
            const double rc = kernels::min_reduced_cost(cost.data(), u.data(),
                                                        std::size_t(n1), v.data(),
                                                        std::size_t(n2), &idx);
            if (rc >= -kRcTol) break;
            ei = int(idx / std::size_t(n2));
            ej = int(idx % std::size_t(n2));
        } else {
            for (int i = 0; i < n1 && ei < 0; ++i)
                for (int j = 0; j < n2; ++j)
                    if (cost[std::size_t(i) * n2 + j] - u[std::size_t(i)] -
                            v[std::size_t(j)] < -kRcTol) {
                        ei = i;
                        ej = j;
                        break;
                    }
            if (ei < 0) break;
        }

        // Cycle: entering cell plus the tree path from its row to its column.
        const std::vector<int> path =
            tree_path(basis, basis.row_node(ei), basis.col_node(ej));
        // Path edges alternate -theta, +theta, ... starting at the row node.
        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (std::size_t s = 0; s < path.size(); s += 2) {
            const Cell& c = basis.cells[std::size_t(path[s])];
            if (c.flow < theta ||
                (c.flow == theta && leaving >= 0 &&
                 (c.i < basis.cells[std::size_t(leaving)].i ||
                  (c.i == basis.cells[std::size_t(leaving)].i &&
                   c.j < basis.cells[std::size_t(leaving)].j)))) {
                theta = c.flow;
                leaving = path[s];
            }
        }
        if (leaving < 0) throw std::runtime_error("solve_ot: malformed pivot cycle");

        for (std::size_t s = 0; s < path.size(); ++s) {
            Cell& c = basis.cells[std::size_t(path[s])];
            c.flow += (s % 2 == 0) ? -theta : theta;
        }
        basis.cells[std::size_t(leaving)] = {ei, ej, theta};

        stall = (theta <= kPerturb * 0.5) ? stall + 1 : 0;
        if (stall > stall_limit) bland = true;
        if (++pivots > max_pivots)
            throw std::runtime_error("solve_ot: pivot limit exceeded");
    }

    extract_exact_flows(basis, p, q);

    OtSolution out;
    out.pivots = pivots;
    out.coupling.n1 = n1;
    out.coupling.n2 = n2;
    out.coupling.plan.assign(std::size_t(n1) * std::size_t(n2), 0.0);
    double obj = 0.0;
    for (const Cell& c : basis.cells) {
        out.coupling.plan[std::size_t(c.i) * n2 + c.j] = c.flow;
        obj += c.flow * cost[std::size_t(c.i) * n2 + c.j];
    }
    out.coupling.objective = obj;
    out.duals.u = std::move(u);
    out.duals.v = std::move(v);
    return out;
}

}  // namespace qmetric

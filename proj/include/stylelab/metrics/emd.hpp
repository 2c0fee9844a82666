#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// Exact solver for the balanced transportation problem
//   min sum c[i][j] x[i][j]  s.t.  sum_j x = supply_i, sum_i x = demand_j, x >= 0
// using the transportation simplex: northwest-corner start, u/v potentials,
// Bland's entering/leaving rule (anti-cycling under degeneracy). Suitable
// for the small instances used here (style distributions, document bags).
class TransportSolver {
public:
    // cost is row-major m x n; supply and demand must have equal totals
    // (they are rescaled to sum 1 internally).
    static double solve(std::vector<double> supply, std::vector<double> demand,
                        const std::vector<double>& cost) {
        int m = static_cast<int>(supply.size());
        int n = static_cast<int>(demand.size());
        require(m >= 1 && n >= 1, "transport: empty marginals");
        require(cost.size() == static_cast<size_t>(m) * static_cast<size_t>(n),
                "transport: cost size mismatch");
        double sa = 0, sb = 0;
        for (double v : supply) {
            require(v >= 0, "transport: negative supply");
            sa += v;
        }
        for (double v : demand) {
            require(v >= 0, "transport: negative demand");
            sb += v;
        }
        require(sa > 0 && sb > 0, "transport: zero total mass");
        for (double& v : supply) v /= sa;
        for (double& v : demand) v /= sb;

        // northwest-corner initial basis: exactly m+n-1 cells
        struct Cell {
            int i, j;
            double flow;
        };
        std::vector<Cell> basis;
        basis.reserve(static_cast<size_t>(m + n - 1));
        {
            std::vector<double> a = supply, b = demand;
            int i = 0, j = 0;
            for (;;) {
                double x = std::min(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)]);
                x = std::max(x, 0.0);
                basis.push_back({i, j, x});
                a[static_cast<size_t>(i)] -= x;
                b[static_cast<size_t>(j)] -= x;
                if (i == m - 1 && j == n - 1) break;
                if (i == m - 1) ++j;
                else if (j == n - 1) ++i;
                else if (a[static_cast<size_t>(i)] <= 0) ++i;
                else ++j;
            }
        }

        std::vector<double> u(static_cast<size_t>(m)), v(static_cast<size_t>(n));
        std::vector<char> udone(static_cast<size_t>(m)), vdone(static_cast<size_t>(n));
        std::vector<std::vector<int>> row_cells(static_cast<size_t>(m));
        std::vector<std::vector<int>> col_cells(static_cast<size_t>(n));

        const double tol = 1e-12;
        const int max_iter = 20000;
        for (int iter = 0; iter < max_iter; ++iter) {
            // potentials from the basis tree (u[0] = 0, then propagate)
            std::fill(udone.begin(), udone.end(), 0);
            std::fill(vdone.begin(), vdone.end(), 0);
            for (auto& rc : row_cells) rc.clear();
            for (auto& cc : col_cells) cc.clear();
            for (size_t k = 0; k < basis.size(); ++k) {
                row_cells[static_cast<size_t>(basis[k].i)].push_back(static_cast<int>(k));
                col_cells[static_cast<size_t>(basis[k].j)].push_back(static_cast<int>(k));
            }
            u[0] = 0;
            udone[0] = 1;
            std::vector<std::pair<char, int>> stack = {{'r', 0}};  // 'r' row node, 'c' col node
            while (!stack.empty()) {
                auto [kind, idx] = stack.back();
                stack.pop_back();
                if (kind == 'r') {
                    for (int k : row_cells[static_cast<size_t>(idx)]) {
                        int j = basis[static_cast<size_t>(k)].j;
                        if (!vdone[static_cast<size_t>(j)]) {
                            v[static_cast<size_t>(j)] =
                                cost[static_cast<size_t>(idx) * static_cast<size_t>(n) + static_cast<size_t>(j)] -
                                u[static_cast<size_t>(idx)];
                            vdone[static_cast<size_t>(j)] = 1;
                            stack.push_back({'c', j});
                        }
                    }
                } else {
                    for (int k : col_cells[static_cast<size_t>(idx)]) {
                        int i = basis[static_cast<size_t>(k)].i;
                        if (!udone[static_cast<size_t>(i)]) {
                            u[static_cast<size_t>(i)] =
                                cost[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(idx)] -
                                v[static_cast<size_t>(idx)];
                            udone[static_cast<size_t>(i)] = 1;
                            stack.push_back({'r', i});
                        }
                    }
                }
            }

            // entering cell: Bland's rule — first (row-major) cell with
            // negative reduced cost
            int ei = -1, ej = -1;
            std::vector<char> in_basis(static_cast<size_t>(m) * static_cast<size_t>(n), 0);
            for (const Cell& c : basis)
                in_basis[static_cast<size_t>(c.i) * static_cast<size_t>(n) + static_cast<size_t>(c.j)] = 1;
            for (int i = 0; i < m && ei < 0; ++i)
                for (int j = 0; j < n; ++j) {
                    size_t idx = static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j);
                    if (in_basis[idx]) continue;
                    double rc = cost[idx] - u[static_cast<size_t>(i)] - v[static_cast<size_t>(j)];
                    if (rc < -tol) {
                        ei = i;
                        ej = j;
                        break;
                    }
                }
            if (ei < 0) break;  // optimal

            // unique cycle: path in the basis tree from row ei to col ej
            // (parents over tree nodes; rows are 0..m-1, cols are m..m+n-1)
            int total_nodes = m + n;
            std::vector<int> parent_node(static_cast<size_t>(total_nodes), -2);
            std::vector<int> parent_cell(static_cast<size_t>(total_nodes), -1);
            std::vector<int> queue = {ei};
            parent_node[static_cast<size_t>(ei)] = -1;
            for (size_t qh = 0; qh < queue.size(); ++qh) {
                int node = queue[qh];
                if (node == m + ej) break;
                if (node < m) {
                    for (int k : row_cells[static_cast<size_t>(node)]) {
                        int next = m + basis[static_cast<size_t>(k)].j;
                        if (parent_node[static_cast<size_t>(next)] == -2) {
                            parent_node[static_cast<size_t>(next)] = node;
                            parent_cell[static_cast<size_t>(next)] = k;
                            queue.push_back(next);
                        }
                    }
                } else {
                    for (int k : col_cells[static_cast<size_t>(node - m)]) {
                        int next = basis[static_cast<size_t>(k)].i;
                        if (parent_node[static_cast<size_t>(next)] == -2) {
                            parent_node[static_cast<size_t>(next)] = node;
                            parent_cell[static_cast<size_t>(next)] = k;
                            queue.push_back(next);
                        }
                    }
                }
            }
            require(parent_node[static_cast<size_t>(m + ej)] != -2, "transport: basis not connected");

            // walk back col ej -> row ei; cells alternate -,+,-,...
            std::vector<int> minus_cells, plus_cells;
            {
                int node = m + ej;
                bool minus = true;
                while (parent_node[static_cast<size_t>(node)] != -1) {
                    int k = parent_cell[static_cast<size_t>(node)];
                    (minus ? minus_cells : plus_cells).push_back(k);
                    node = parent_node[static_cast<size_t>(node)];
                    minus = !minus;
                }
            }
            // theta: smallest flow among minus cells; Bland tie-break by cell index
            int leave = -1;
            double theta = 0;
            for (int k : minus_cells) {
                double f = basis[static_cast<size_t>(k)].flow;
                if (leave < 0 || f < theta || (f == theta && k < leave)) {
                    leave = k;
                    theta = f;
                }
            }
            require(leave >= 0, "transport: no leaving cell");
            for (int k : minus_cells) basis[static_cast<size_t>(k)].flow -= theta;
            for (int k : plus_cells) basis[static_cast<size_t>(k)].flow += theta;
            Cell entering{ei, ej, theta};
            basis[static_cast<size_t>(leave)] = entering;
        }

        double total = 0;
        for (const Cell& c : basis)
            total += cost[static_cast<size_t>(c.i) * static_cast<size_t>(n) + static_cast<size_t>(c.j)] * c.flow;
        return total;
    }
};

inline std::vector<double> unit_ground_matrix(int n) {
    std::vector<double> g(static_cast<size_t>(n) * static_cast<size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(i)] = 0.0;
    return g;
}

// Earth-Mover's Distance between two distributions over the same n classes.
// With the default all-ones-off-diagonal ground matrix the result lies in
// [0, 1] and coincides with total variation distance.
inline double emd(const std::vector<double>& p, const std::vector<double>& q,
                  const std::vector<double>& ground) {
    int n = static_cast<int>(p.size());
    if (q.size() != p.size()) throw ContractError("emd: length mismatch");
    require(n >= 1 && n <= 64, "emd: 1 <= n <= 64");
    require(ground.size() == static_cast<size_t>(n) * static_cast<size_t>(n), "emd: ground matrix size");
    double sp = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        require(p[static_cast<size_t>(i)] >= 0 && q[static_cast<size_t>(i)] >= 0,
                "emd: negative probability");
        sp += p[static_cast<size_t>(i)];
        sq += q[static_cast<size_t>(i)];
    }
    require(std::abs(sp - 1.0) <= 1e-9 && std::abs(sq - 1.0) <= 1e-9, "emd: inputs must be normalized");
    for (int i = 0; i < n; ++i) {
        require(ground[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(i)] == 0.0,
                "emd: ground matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j) {
            double gij = ground[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
            require(gij >= 0, "emd: ground distances must be nonnegative");
            require(gij == ground[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i)],
                    "emd: ground matrix must be symmetric");
        }
    }
    // identical inputs need no transport; keeps the zero case exact
    if (p == q) return 0.0;
    return TransportSolver::solve(p, q, ground);
}

inline double emd(const std::vector<double>& p, const std::vector<double>& q) {
    return emd(p, q, unit_ground_matrix(static_cast<int>(p.size())));
}

// Direction-corrected EMD: positive when probability mass moved toward the
// target class (ties on the boundary count as toward), negative otherwise.
inline double dc_emd(const std::vector<double>& p_before, const std::vector<double>& p_after,
                     int target, const std::vector<double>& ground) {
    int n = static_cast<int>(p_before.size());
    if (target < 0 || target >= n) throw ContractError("dc_emd: target out of range");
    double d = emd(p_before, p_after, ground);
    bool toward = p_after[static_cast<size_t>(target)] >= p_before[static_cast<size_t>(target)];
    return toward ? d : -d;
}

inline double dc_emd(const std::vector<double>& p_before, const std::vector<double>& p_after,
                     int target) {
    return dc_emd(p_before, p_after, target, unit_ground_matrix(static_cast<int>(p_before.size())));
}

}  // namespace stylelab

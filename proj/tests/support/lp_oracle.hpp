#pragma once

// Brute-force LP oracle for transport problems, independent of the
// library's transportation-simplex implementation. Solves
//   min c.x  s.t.  A x = b, x >= 0
// with a dense two-phase tableau simplex using Bland's rule.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lp_oracle {

inline double solve_lp(std::vector<std::vector<double>> A, std::vector<double> b,
                       std::vector<double> c) {
    const double eps = 1e-11;
    size_t m = A.size();
    size_t n = c.size();
    for (size_t i = 0; i < m; ++i)
        if (b[i] < 0) {
            b[i] = -b[i];
            for (size_t j = 0; j < n; ++j) A[i][j] = -A[i][j];
        }

    // tableau over structural + artificial variables
    size_t total = n + m;
    std::vector<std::vector<double>> T(m, std::vector<double>(total + 1, 0.0));
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][total] = b[i];
        basis[i] = n + i;
    }

    auto pivot = [&](size_t row, size_t col) {
        double p = T[row][col];
        for (size_t j = 0; j <= total; ++j) T[row][j] /= p;
        for (size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = T[i][col];
            if (f == 0.0) continue;
            for (size_t j = 0; j <= total; ++j) T[i][j] -= f * T[row][j];
        }
        basis[row] = col;
    };

    // price a candidate objective, returning reduced costs
    auto run_simplex = [&](const std::vector<double>& obj, size_t allowed_cols) {
        for (long guard = 0; guard < 200000; ++guard) {
            // reduced costs: obj_j - obj_B . column_j
            size_t enter = total + 1;
            for (size_t j = 0; j < allowed_cols; ++j) {
                double rc = obj[j];
                for (size_t i = 0; i < m; ++i) rc -= obj[basis[i]] * T[i][j];
                if (rc < -eps) {
                    enter = j;  // Bland: first negative
                    break;
                }
            }
            if (enter > total) return;
            size_t leave = m;
            double best = 0;
            for (size_t i = 0; i < m; ++i) {
                if (T[i][enter] > eps) {
                    double ratio = T[i][total] / T[i][enter];
                    if (leave == m || ratio < best - 1e-15 ||
                        (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave == m) throw std::runtime_error("lp_oracle: unbounded");
            pivot(leave, enter);
        }
        throw std::runtime_error("lp_oracle: iteration guard tripped");
    };

    // phase 1: minimize sum of artificials
    std::vector<double> phase1(total, 0.0);
    for (size_t j = n; j < total; ++j) phase1[j] = 1.0;
    run_simplex(phase1, total);
    double infeas = 0;
    for (size_t i = 0; i < m; ++i)
        if (basis[i] >= n) infeas += T[i][total];
    if (infeas > 1e-7) throw std::runtime_error("lp_oracle: infeasible");

    // drive remaining zero-level artificials out of the basis so phase 2
    // cannot perturb them; rows with no structural pivot are redundant and
    // neutralized instead
    for (size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        size_t col = n;
        for (size_t j = 0; j < n; ++j)
            if (std::abs(T[i][j]) > eps) {
                col = j;
                break;
            }
        if (col < n) {
            pivot(i, col);
        } else {
            for (size_t j = 0; j <= total; ++j) T[i][j] = 0.0;  // redundant row
            T[i][basis[i]] = 1.0;
        }
    }

    // phase 2: artificials priced out (never re-enter)
    std::vector<double> phase2(total, 0.0);
    for (size_t j = 0; j < n; ++j) phase2[j] = c[j];
    run_simplex(phase2, n);

    double value = 0;
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < n) value += c[basis[i]] * T[i][total];
    return value;
}

// Optimal transport cost via the LP above. supply: m, demand: n,
// cost row-major m x n. The redundant last demand constraint is dropped.
inline double transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::vector<double>& cost) {
    size_t m = supply.size(), n = demand.size();
    size_t nv = m * n;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (size_t i = 0; i < m; ++i) {
        std::vector<double> row(nv, 0.0);
        for (size_t j = 0; j < n; ++j) row[i * n + j] = 1.0;
        A.push_back(row);
        b.push_back(supply[i]);
    }
    for (size_t j = 0; j + 1 < n; ++j) {
        std::vector<double> row(nv, 0.0);
        for (size_t i = 0; i < m; ++i) row[i * n + j] = 1.0;
        A.push_back(row);
        b.push_back(demand[j]);
    }
    std::vector<double> c(cost.begin(), cost.end());
    return solve_lp(std::move(A), std::move(b), std::move(c));
}

}  // namespace lp_oracle

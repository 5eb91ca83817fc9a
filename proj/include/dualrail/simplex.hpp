#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "dualrail/errors.hpp"

namespace dualrail {

enum class LpStatus { optimal, infeasible, unbounded };

/// Linear program in equality form:
///   maximize c . x   subject to   A x = b,  x >= 0.
/// Dense row-major storage; Scalar is double or an exact rational type.
template <typename Scalar>
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Scalar> a;  // rows x cols, row-major
    std::vector<Scalar> b;  // rows
    std::vector<Scalar> c;  // cols

    Scalar& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static LinearProgram zero(std::size_t rows, std::size_t cols) {
        LinearProgram lp;
        lp.rows = rows;
        lp.cols = cols;
        lp.a.assign(rows * cols, Scalar(0));
        lp.b.assign(rows, Scalar(0));
        lp.c.assign(cols, Scalar(0));
        return lp;
    }
};

template <typename Scalar>
struct LpSolution {
    LpStatus status = LpStatus::optimal;
    std::vector<Scalar> x;       // primal point when optimal
    std::vector<Scalar> farkas;  // y with y.A <= 0 and y.b > 0 when infeasible
    Scalar objective = Scalar(0);
    Scalar infeasibility = Scalar(0);  // phase-1 optimum (sum of artificials)
};

/// Two-phase dense simplex with Bland's rule (finite for every input; exact
/// types use eps = 0).
template <typename Scalar>
class SimplexSolver {
  public:
    explicit SimplexSolver(Scalar eps) : eps_(eps) {}

    LpSolution<Scalar> solve(const LinearProgram<Scalar>& lp) const {
        const std::size_t m = lp.rows;
        const std::size_t n = lp.cols;
        const std::size_t total = n + m;  // original vars + artificials

        // Tableau: m constraint rows (columns: vars, artificials, rhs) plus a
        // cost row.  Row signs are flipped so the rhs is nonnegative; flips
        // are undone when the Farkas vector is reported.
        std::vector<std::vector<Scalar>> t(m + 1, std::vector<Scalar>(total + 1, Scalar(0)));
        std::vector<int> sign(m, 1);
        for (std::size_t i = 0; i < m; ++i) {
            const bool flip = lp.b[i] < Scalar(0);
            sign[i] = flip ? -1 : 1;
            for (std::size_t j = 0; j < n; ++j) {
                t[i][j] = flip ? -lp.at(i, j) : lp.at(i, j);
            }
            t[i][n + i] = Scalar(1);
            t[i][total] = flip ? -lp.b[i] : lp.b[i];
        }
        std::vector<std::size_t> basis(m);
        for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

        // Phase 1: minimize the sum of artificials.  Cost row starts as
        // -(sum of constraint rows) over the original columns.
        auto& cost = t[m];
        for (std::size_t j = 0; j <= total; ++j) {
            Scalar s(0);
            for (std::size_t i = 0; i < m; ++i) s += t[i][j];
            cost[j] = -s;
        }
        for (std::size_t i = 0; i < m; ++i) cost[n + i] = Scalar(0);

        run_simplex(t, basis, total, /*restrict_to=*/total);

        LpSolution<Scalar> sol;
        sol.infeasibility = -t[m][total];
        if (sol.infeasibility > eps_) {
            sol.status = LpStatus::infeasible;
            // Phase 1 maximizes -(sum of artificials), so the artificial
            // column of the cost row holds y_i + 1 with y the simplex
            // multipliers; -y is the separating vector for the row-flipped
            // system, and the row signs are undone on top.
            sol.farkas.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const Scalar y = Scalar(1) - t[m][n + i];
                sol.farkas[i] = Scalar(sign[i]) * y;
            }
            return sol;
        }

        // Drive basic artificials out, or mark their rows redundant.
        std::vector<bool> active(m, true);
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            std::size_t enter = total;
            for (std::size_t j = 0; j < n; ++j) {
                if (abs_value(t[i][j]) > pivot_eps()) {
                    enter = j;
                    break;
                }
            }
            if (enter == total) {
                active[i] = false;  // redundant constraint
            } else {
                pivot(t, basis, i, enter, total);
            }
        }

        // Phase 2: maximize c over the original columns.
        for (std::size_t j = 0; j <= total; ++j) cost[j] = Scalar(0);
        for (std::size_t j = 0; j < n; ++j) cost[j] = -lp.c[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n && lp.c[basis[i]] != Scalar(0)) {
                add_scaled(cost, t[i], lp.c[basis[i]], total);
            }
        }
        const bool bounded = run_simplex(t, basis, n, total, &active);
        if (!bounded) {
            sol.status = LpStatus::unbounded;
            return sol;
        }

        sol.status = LpStatus::optimal;
        sol.x.assign(n, Scalar(0));
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) sol.x[basis[i]] = t[i][total];
        }
        sol.objective = t[m][total];
        return sol;
    }

  private:
    Scalar eps_;

    Scalar pivot_eps() const {
        if constexpr (std::is_floating_point_v<Scalar>) {
            return Scalar(1e-11);
        } else {
            return Scalar(0);
        }
    }

    static Scalar abs_value(const Scalar& v) { return v < Scalar(0) ? Scalar(-v) : v; }

    static void add_scaled(std::vector<Scalar>& dst, const std::vector<Scalar>& src,
                           const Scalar& factor, std::size_t total) {
        for (std::size_t j = 0; j <= total; ++j) dst[j] += factor * src[j];
    }

    void pivot(std::vector<std::vector<Scalar>>& t, std::vector<std::size_t>& basis,
               std::size_t row, std::size_t col, std::size_t total) const {
        auto& pr = t[row];
        const Scalar p = pr[col];
        for (std::size_t j = 0; j <= total; ++j) pr[j] /= p;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == row) continue;
            const Scalar f = t[i][col];
            if (f == Scalar(0)) continue;
            for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * pr[j];
        }
        basis[row] = col;
    }

    // Bland's rule over columns [0, limit); returns false on unboundedness.
    bool run_simplex(std::vector<std::vector<Scalar>>& t, std::vector<std::size_t>& basis,
                     std::size_t limit, std::size_t total,
                     const std::vector<bool>* active = nullptr) const {
        const std::size_t m = basis.size();
        const std::size_t max_iters = 2000 + 50 * (m + limit);
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (t[m][j] < -eps_) {
                    enter = j;
                    break;
                }
            }
            if (enter == limit) return true;  // optimal

            std::size_t leave = m;
            for (std::size_t i = 0; i < m; ++i) {
                if (active && !(*active)[i]) continue;
                if (t[i][enter] > pivot_eps()) {
                    if (leave == m) {
                        leave = i;
                        continue;
                    }
                    const Scalar lhs = t[i][total] * t[leave][enter];
                    const Scalar rhs = t[leave][total] * t[i][enter];
                    if (lhs < rhs || (lhs == rhs && basis[i] < basis[leave])) leave = i;
                }
            }
            if (leave == m) return false;  // unbounded
            pivot(t, basis, leave, enter, total);
        }
        throw SolverFailure("simplex iteration limit exceeded");
    }
};

}  // namespace dualrail

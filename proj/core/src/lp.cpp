#include "geoscan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace geoscan {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

// Simplex working set in standard form: min c.x, T x = rhs, x >= 0, rhs >= 0.
// Columns: [original vars | ub slacks | artificials].
struct Tableau {
    Eigen::MatrixXd t;       // m x n_total
    Eigen::VectorXd rhs;     // m
    Eigen::VectorXd cost;    // n_total, current phase costs
    std::vector<int> basis;  // basic column per row
    int n_struct = 0;        // original + slack columns
    int n_total = 0;
    LpOptions opts;

    int m() const { return static_cast<int>(rhs.size()); }

    void pivot(int row, int col) {
        const double p = t(row, col);
        t.row(row) /= p;
        rhs(row) /= p;
        for (int i = 0; i < m(); ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) {
                t.row(i) -= f * t.row(row);
                rhs(i) -= f * rhs(row);
            }
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // Reduced-cost row, kept updated alongside the tableau.
    Eigen::VectorXd reduced;  // n_total

    void rebuild_reduced() {
        reduced = cost;
        for (int i = 0; i < m(); ++i) {
            const double cb = cost(basis[static_cast<std::size_t>(i)]);
            if (cb != 0.0) reduced -= cb * t.row(i).transpose();
        }
    }

    double objective() const {
        double v = 0.0;
        for (int i = 0; i < m(); ++i) v += cost(basis[static_cast<std::size_t>(i)]) * rhs(i);
        return v;
    }
};

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

// Runs simplex iterations on the current cost vector. `allowed` masks columns
// permitted to enter the basis.
PhaseResult run_simplex(Tableau& tb, const std::vector<bool>& allowed, int max_iter,
                        int& iter_count) {
    const int m = tb.m();
    const int n = tb.n_total;
    tb.rebuild_reduced();

    int stall = 0;
    double last_obj = tb.objective();
    bool bland = false;

    while (true) {
        if (iter_count >= max_iter) return PhaseResult::IterationLimit;

        // Entering column.
        int enter = -1;
        if (bland) {
            for (int j = 0; j < n; ++j) {
                if (allowed[static_cast<std::size_t>(j)] &&
                    tb.reduced(j) < -tb.opts.optimality_tol) {
                    enter = j;
                    break;
                }
            }
        } else {
            double best = -tb.opts.optimality_tol;
            for (int j = 0; j < n; ++j) {
                if (allowed[static_cast<std::size_t>(j)] && tb.reduced(j) < best) {
                    best = tb.reduced(j);
                    enter = j;
                }
            }
        }
        if (enter < 0) return PhaseResult::Optimal;

        // Ratio test, lowest basic index on ties.
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double a = tb.t(i, enter);
            if (a > tb.opts.pivot_tol) {
                const double ratio = tb.rhs(i) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && leave >= 0 &&
                     tb.basis[static_cast<std::size_t>(i)] <
                         tb.basis[static_cast<std::size_t>(leave)])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return PhaseResult::Unbounded;

        tb.pivot(leave, enter);
        {
            const double rc = tb.reduced(enter);
            tb.reduced -= rc * tb.t.row(leave).transpose();
            tb.reduced(enter) = 0.0;
        }
        ++iter_count;

        const double obj = tb.objective();
        if (obj < last_obj - 1e-12) {
            last_obj = obj;
            stall = 0;
            bland = false;
        } else if (++stall > 50) {
            bland = true;  // degenerate stretch; Bland's rule guarantees escape
        }
    }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
    const int n = problem.num_vars();
    const int m_e = static_cast<int>(problem.b_eq.size());
    const int m_u = static_cast<int>(problem.b_ub.size());
    const int m = m_e + m_u;

    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(n);
    sol.dual_eq = Eigen::VectorXd::Zero(m_e);
    sol.dual_ub = Eigen::VectorXd::Zero(m_u);

    if (m == 0) {
        // x = 0 is optimal iff no negative cost (x unbounded above otherwise).
        sol.status = (problem.c.size() == 0 || problem.c.minCoeff() >= 0.0)
                         ? LpStatus::Optimal
                         : LpStatus::Unbounded;
        sol.objective = 0.0;
        sol.dual_objective = 0.0;
        return sol;
    }

    // Assemble rows [a_eq; a_ub] with slack columns for the ub block.
    const int n_struct = n + m_u;
    Eigen::MatrixXd a(m, n_struct);
    a.setZero();
    Eigen::VectorXd b(m);
    if (m_e > 0) {
        a.topLeftCorner(m_e, n) = problem.a_eq;
        b.head(m_e) = problem.b_eq;
    }
    if (m_u > 0) {
        a.bottomLeftCorner(m_u, n) = problem.a_ub;
        a.bottomRightCorner(m_u, m_u).setIdentity();
        b.tail(m_u) = problem.b_ub;
    }

    // Row equilibration; remember per-row multiplier to map duals back.
    Eigen::VectorXd row_mult = Eigen::VectorXd::Ones(m);
    for (int i = 0; i < m; ++i) {
        double scale = a.row(i).cwiseAbs().maxCoeff();
        if (scale <= 0.0) scale = 1.0;
        double mult = 1.0 / scale;
        if (b(i) * mult < 0.0) mult = -mult;
        a.row(i) *= mult;
        b(i) *= mult;
        row_mult(i) = mult;
    }

    // Artificial columns for every row; slacks of +1 rows start basic instead.
    std::vector<int> art_col(m, -1);
    int n_art = 0;
    std::vector<int> basis(m, -1);
    for (int i = 0; i < m; ++i) {
        if (i >= m_e) {
            const int slack = n + (i - m_e);
            if (a(i, slack) > 0.0) {
                basis[static_cast<std::size_t>(i)] = slack;
                continue;
            }
        }
        art_col[static_cast<std::size_t>(i)] = n_struct + n_art;
        ++n_art;
    }

    Tableau tb;
    tb.opts = options;
    tb.n_struct = n_struct;
    tb.n_total = n_struct + n_art;
    tb.t.setZero(m, tb.n_total);
    tb.t.leftCols(n_struct) = a;
    tb.rhs = b;
    tb.basis = basis;
    for (int i = 0; i < m; ++i) {
        const int ac = art_col[static_cast<std::size_t>(i)];
        if (ac >= 0) {
            tb.t(i, ac) = 1.0;
            tb.basis[static_cast<std::size_t>(i)] = ac;
        }
    }

    const int max_iter =
        options.max_iterations > 0 ? options.max_iterations : 400 * (m + n_struct + 10);
    int iters = 0;

    // Phase 1: drive artificials to zero.
    if (n_art > 0) {
        tb.cost.setZero(tb.n_total);
        tb.cost.tail(n_art).setOnes();
        std::vector<bool> allowed(static_cast<std::size_t>(tb.n_total), true);
        const PhaseResult r = run_simplex(tb, allowed, max_iter, iters);
        sol.iterations = iters;
        if (r == PhaseResult::IterationLimit) {
            sol.status = LpStatus::IterationLimit;
            return sol;
        }
        const double infeas = tb.objective();
        if (infeas > options.feasibility_tol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot lingering artificials out where possible.
        for (int i = 0; i < m; ++i) {
            if (tb.basis[static_cast<std::size_t>(i)] >= n_struct) {
                for (int j = 0; j < n_struct; ++j) {
                    if (std::abs(tb.t(i, j)) > options.pivot_tol) {
                        tb.pivot(i, j);
                        break;
                    }
                }
            }
        }
    }

    // Phase 2 on the original costs; artificials may not re-enter.
    tb.cost.setZero(tb.n_total);
    tb.cost.head(n) = problem.c;
    std::vector<bool> allowed(static_cast<std::size_t>(tb.n_total), false);
    for (int j = 0; j < n_struct; ++j) allowed[static_cast<std::size_t>(j)] = true;
    const PhaseResult r = run_simplex(tb, allowed, max_iter, iters);
    sol.iterations = iters;
    if (r == PhaseResult::IterationLimit) {
        sol.status = LpStatus::IterationLimit;
        return sol;
    }
    if (r == PhaseResult::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    for (int i = 0; i < m; ++i) {
        const int bcol = tb.basis[static_cast<std::size_t>(i)];
        if (bcol < n) sol.x(bcol) = tb.rhs(i);
    }
    sol.objective = problem.c.dot(sol.x);

    // Duals from the basis: solve B' y = c_B on the scaled rows, then undo
    // the row multipliers.
    Eigen::MatrixXd bmat(m, m);
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) {
        const int bcol = tb.basis[static_cast<std::size_t>(i)];
        if (bcol < n_struct) {
            bmat.col(i) = a.col(bcol);
            cb(i) = bcol < n ? problem.c(bcol) : 0.0;
        } else {
            // Residual artificial basic at zero level: its column is the unit
            // vector of the row it was created for.
            int origin_row = 0;
            for (int k = 0; k < m; ++k) {
                if (art_col[static_cast<std::size_t>(k)] == bcol) {
                    origin_row = k;
                    break;
                }
            }
            bmat.col(i).setZero();
            bmat(origin_row, i) = 1.0;
            cb(i) = 0.0;
        }
    }
    Eigen::VectorXd y_scaled = bmat.transpose().fullPivLu().solve(cb);
    Eigen::VectorXd y = y_scaled.cwiseProduct(row_mult);
    if (m_e > 0) sol.dual_eq = y.head(m_e);
    if (m_u > 0) sol.dual_ub = y.tail(m_u);
    sol.dual_objective = sol.dual_eq.dot(problem.b_eq) + sol.dual_ub.dot(problem.b_ub);
    sol.status = LpStatus::Optimal;
    return sol;
}

}  // namespace geoscan

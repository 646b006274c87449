#ifndef GEOSCAN_LP_HPP
#define GEOSCAN_LP_HPP

#include <Eigen/Dense>

#include <string>

namespace geoscan {

/**
 * Dense linear program:
 *
 *   min  c.x
 *   s.t. a_eq x  = b_eq
 *        a_ub x <= b_ub
 *        x >= 0
 *
 * Solved by a two-phase primal simplex on a row-equilibrated tableau.
 * Pivoting is Dantzig's rule with lowest-index tie-breaking, falling back to
 * Bland's rule after a stall, so runs are deterministic and cycle-free.
 */
struct LpProblem {
    Eigen::MatrixXd a_eq;  // m_e x n (may be 0 x n)
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd a_ub;  // m_u x n (may be 0 x n)
    Eigen::VectorXd b_ub;
    Eigen::VectorXd c;     // n

    int num_vars() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    Eigen::VectorXd x;
    double objective = 0.0;
    /// Lagrange multipliers d(objective)/d(b) for each constraint row.
    Eigen::VectorXd dual_eq;
    Eigen::VectorXd dual_ub;
    double dual_objective = 0.0;
    int iterations = 0;
};

struct LpOptions {
    int max_iterations = 0;     // 0 = automatic from problem size
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-9;
    double feasibility_tol = 1e-7;
};

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

std::string to_string(LpStatus status);

}  // namespace geoscan

#endif  // GEOSCAN_LP_HPP

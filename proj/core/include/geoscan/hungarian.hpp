#ifndef GEOSCAN_HUNGARIAN_HPP
#define GEOSCAN_HUNGARIAN_HPP

#include <Eigen/Dense>

#include <vector>

namespace geoscan {

/**
 * Exact minimum-cost assignment on a square cost matrix (Hungarian method,
 * O(n^3) potential formulation). Returns the column assigned to each row.
 */
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& row_to_col);

}  // namespace geoscan

#endif  // GEOSCAN_HUNGARIAN_HPP

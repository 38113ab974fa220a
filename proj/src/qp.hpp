#pragma once

#include <Eigen/Dense>
#include <vector>

namespace netflow {

// Convex quadratic program
//   min 1/2 x^T H x + g^T x   s.t.   A x = b,   lo <= x <= hi
// H symmetric positive semidefinite. Solved by a primal active-set method on
// the bound constraints; equality constraints stay in the working set.
struct QPResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    bool unique = true;                    // strictly convex on the feasible subspace
    std::vector<int> active_lo, active_hi; // bound constraints active at the solution
    int iterations = 0;
};

QPResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      const Eigen::VectorXd& x0);

// Feasible point of {A x = b, lo <= x <= hi} with A of full structure rank, or
// empty if infeasible. Small dimensions only; meant for per-junction blocks.
struct FeasibleSet {
    bool feasible = false;
    Eigen::VectorXd x0;      // a relative-interior feasible point
    Eigen::MatrixXd basis;   // null-space directions (n x dim)
    int dim = 0;
};

FeasibleSet find_feasible_box(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double tol);

// Range [min, max] of coordinate `coord` over {A x = b, lo <= x <= hi},
// assuming the set is nonempty. Exact for dim <= 2 via vertex enumeration.
std::pair<double, double> coordinate_range(const FeasibleSet& fs, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi, int coord);

} // namespace netflow

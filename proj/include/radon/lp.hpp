#pragma once

#include <Eigen/Dense>

namespace radon::lp {

enum class Status { kOptimal, kUnbounded, kIterationLimit };

struct Solution {
  Status status = Status::kOptimal;
  double objective = 0.0;
  Eigen::VectorXd x;      // primal solution
  Eigen::VectorXd duals;  // one multiplier per inequality row, >= 0
  int pivots = 0;
};

/// Dense tableau simplex for
///
///     maximize c^T x  subject to  A x <= b,  x >= 0,
///
/// with b >= 0, so the slack basis is feasible and no phase one is needed.
/// Entering variables are chosen by Bland's rule, which rules out cycling on
/// the degenerate vertices that transportation polytopes are full of.
/// Intended for problems with at most a few hundred columns.
Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_pivots = 100000);

}  // namespace radon::lp

#include "radon/lp.hpp"

#include <cmath>
#include <limits>

#include "radon/errors.hpp"

namespace radon::lp {

namespace {
constexpr double kPivotTol = 1e-12;
constexpr double kCostTol = 1e-12;
}  // namespace

Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_pivots) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw Error("lp::maximize: dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0) throw Error("lp::maximize: right-hand side must be nonnegative");

  // Tableau rows 0..m-1 are constraints, row m holds reduced costs (negated
  // objective coefficients). Columns: n structural, m slack, 1 rhs.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(n + m).head(m) = b;
  T.row(m).head(n) = -c.transpose();

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  Solution sol;
  const Eigen::Index rhs = n + m;
  while (true) {
    // Bland: smallest index with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    if (sol.pivots >= max_pivots) {
      sol.status = Status::kIterationLimit;
      break;
    }

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > kPivotTol) {
        const double ratio = T(i, rhs) / a;
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      sol.status = Status::kUnbounded;
      break;
    }

    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    // Keep the rhs column feasible against roundoff.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, rhs) < 0.0 && T(i, rhs) > -1e-13) T(i, rhs) = 0.0;
    }
    basis[leave] = enter;
    ++sol.pivots;
  }

  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = T(i, rhs);
  }
  sol.objective = c.dot(sol.x);
  sol.duals = T.row(m).segment(n, m).transpose();
  return sol;
}

}  // namespace radon::lp

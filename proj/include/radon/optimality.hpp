#pragma once

#include <vector>

#include "radon/model.hpp"

namespace radon {

inline constexpr double kDefaultActTol = 1e-6;

/// Nodes lower + i (upper - lower) / grid_n, i = 0..grid_n on every axis, so
/// the grid for 2 grid_n contains the one for grid_n.
std::vector<Point> grid_nodes(const Domain& domain, int grid_n);

struct LocalMax {
  Point x;
  double value = 0.0;  // value of sign * p at x
};

/// Projected Newton / gradient ascent on sign * p inside the box.
LocalMax maximize_locally(const DualVariable& dual, const Domain& domain, const Point& start,
                          int sign);

/// Refined local maximizers of sign * p whose value is at least `threshold`,
/// started from every grid-local maximum; duplicates (closer than 1e-7) are
/// removed. Sorted by decreasing value, ties broken lexicographically.
std::vector<LocalMax> scan_extrema(const DualVariable& dual, const Domain& domain, int grid_n,
                                   int sign, double threshold);

/// Global maximizer of |p| by a grid scan followed by local ascent from the
/// top `starts` grid nodes. `value` holds |p| at the returned point.
LocalMax global_max_abs(const DualVariable& dual, const Domain& domain, int grid_n,
                        int starts = 5);

struct FirstOrderReport {
  double max_abs_p = 0.0;
  Point argmax;
  double sup_slack = 0.0;                // max |p| - alpha
  std::vector<double> atom_residuals;    // |p(x_j) - sgn(w_j) alpha|
  double worst_atom_residual = 0.0;
  double pairing_slack = 0.0;            // alpha |u| - <p, u>
  bool sup_bound = false;                // (a)
  bool atoms_on_level_set = false;       // (b)
  bool pairing = false;                  // (c)
  bool pass = false;
  double tol = 0.0;
};

/// Checks p in alpha * subdifferential of |u|_M: |p| <= alpha on the domain,
/// p(x_j) = sgn(w_j) alpha on the support, and <p, u> = alpha |u|_M, all up
/// to `tol`. Requires grid_n >= 16.
FirstOrderReport check_first_order(const Problem& problem, const DiscreteMeasure& u, int grid_n,
                                   double tol);

struct ActiveAtom {
  std::size_t index = 0;
  Point x;
  double lambda = 0.0;
  int sign = 0;          // sgn(p(x_j))
  double p_value = 0.0;
};

/// Active set A = supp u with signs, touching points I+ / I- away from A, the
/// separation radius r0 and the complementarity margin sigma.
struct ActiveSets {
  std::vector<ActiveAtom> atoms;
  std::vector<LocalMax> i_plus;
  std::vector<LocalMax> i_minus;
  double r0 = 0.0;
  double sigma = 0.0;
  /// Curvature margin min_j -lambda_max(s_j Hess p(x_j)) used for r0.
  double local_theta = 0.0;
  double act_tol = kDefaultActTol;
  int grid_n = 0;

  bool strict_complementarity() const { return i_plus.empty() && i_minus.empty(); }
};

/// Builds the active sets of a stationary u. Throws InconsistentStationarity
/// when |p(x_j)| < alpha - act_tol at some atom.
ActiveSets active_sets(const Problem& problem, const DiscreteMeasure& u, int grid_n,
                       double act_tol = kDefaultActTol);

}  // namespace radon

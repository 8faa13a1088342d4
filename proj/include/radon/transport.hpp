#pragma once

#include <utility>

#include "radon/measures.hpp"

namespace radon {

inline constexpr double kDefaultMassTol = 1e-9;

/// Coupling between the atoms of a source and a target measure.
/// gamma(i, j) is the mass moved from rows[i] to cols[j]; cost is the
/// transport part sum gamma(i,j) * cost(i,j) of the objective that produced it.
struct TransportPlan {
  std::vector<Atom> rows;
  std::vector<Atom> cols;
  Eigen::MatrixXd gamma;
  double cost = 0.0;
};

/// Wasserstein-1 distance with Euclidean ground cost between nonnegative
/// measures of equal mass (up to mass_tol). Throws SignError / MassError.
std::pair<double, TransportPlan> w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double mass_tol = kDefaultMassTol);

struct FlatNormResult {
  double value = 0.0;
  /// Coupling between the atoms of u_plus (rows) and u_minus (cols).
  TransportPlan plan;
  double destroyed_plus = 0.0;   // |u_plus - mu|
  double destroyed_minus = 0.0;  // |u_minus - nu|
};

/// Bounded Lipschitz (flat) norm via the partial-transport LP on the atoms
/// of the Jordan decomposition: ground cost min(|x - y|, 2), unmatched mass
/// costs 1 per unit.
FlatNormResult bl_norm_with_plan(const DiscreteMeasure& u);
double bl_norm(const DiscreteMeasure& u);

/// Lower bound for the BL norm from the dual side: maximizes sum phi_i w_i
/// over atom values with |phi| <= 1 and |phi_i - phi_j| <= |x_i - x_j|, then
/// verifies the McShane extension of phi is admissible on a grid_n^d grid
/// over the atoms' bounding box. Requires d <= 2.
double bl_dual_oracle(const DiscreteMeasure& u, int grid_n = 32);

struct W1BlIdentityReport {
  double bl = 0.0;
  double w1 = 0.0;
  double difference = 0.0;
  bool equal = false;
};

/// For zero-mass u on a domain of diameter <= 2, the BL norm equals
/// W1(u_plus, u_minus). Throws MassError if u(Omega) != 0 and DomainError if
/// the domain is too large for the identity to apply.
W1BlIdentityReport check_w1_bl_identity(const DiscreteMeasure& u, const Domain& domain,
                                        double tol = 1e-9);

}  // namespace radon

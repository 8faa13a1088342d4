#pragma once

#include <limits>
#include <vector>

#include "radon/optimality.hpp"

namespace radon {

inline constexpr double kDefaultThetaTol = 1e-8;
inline constexpr double kDefaultSocTol = 1e-8;
inline constexpr double kDefaultBoundaryTol = 1e-9;

/// A perturbation in the admissible class
///   [[ sum_j c_j delta_{x_j} + mu_plus - mu_minus | sum_j V_j delta_{x_j} ]]:
/// weight changes c and position velocities V at the support, plus masses on
/// touching points. mu_minus holds the (nonnegative) magnitudes of the mass
/// placed on I-, which enters the measure with a negative sign.
struct Direction {
  Vector c;
  std::vector<Point> V;
  std::vector<Atom> mu_plus;
  std::vector<Atom> mu_minus;

  static Direction zero(std::size_t n_atoms, int dim);
};

struct HessianCertificate {
  double theta = 0.0;             // min_j -lambda_max(s_j Hess p(x_j))
  std::vector<Matrix> hessians;   // Hess p(x_j)
  bool pass = false;              // theta > theta_tol
};

/// Curvature certificate s_j Hess p(x_j) <= -theta Id. Throws
/// BoundaryAtomError for atoms within boundary_tol of the boundary.
HessianCertificate hessian_certificate(const DualVariable& dual, const ActiveSets& sets,
                                       const Domain& domain,
                                       double theta_tol = kDefaultThetaTol,
                                       double boundary_tol = kDefaultBoundaryTol);

/// Image of a direction under the lifted forward operator:
/// sum c_j k(x_j) + sum Dk(x_j) V_j + sum_{I+} w k(z) - sum_{I-} w k(z).
Vector lifted_image(const Problem& problem, const ActiveSets& sets, const Direction& dir);

/// Symmetric bilinear form
///   <K d1, Hess L(Ku) K d2> - sum_j (1/lambda_j) V1_j^T Hess p(x_j) V2_j.
/// Throws ConeViolation for negative masses on I+-.
double soc_form(const Problem& problem, const DiscreteMeasure& u, const ActiveSets& sets,
                const Direction& d1, const Direction& d2);

struct SocSpectrum {
  double min_value = 0.0;  // min of the form over unit vectors in the cone
  bool exact = true;       // plain eigenvalue (no cone constraint)
  bool sample_relative = false;  // I+- nonempty: cone represented by samples
  Matrix form;             // the assembled matrix
  Vector minimizer;        // coordinates (c, V, w) of the minimizing direction
};

struct SocOptions {
  bool include_positions = true;   // V block
  bool include_touching = true;    // I+- block
  unsigned seed = 2024;
  double tol = 1e-10;              // projected power iteration convergence
  int max_iterations = 200000;
};

/// Assembles the matrix of soc_form on the basis {weights at A} u {d*N
/// position directions} u {touching-point masses}, then minimizes over the
/// unit sphere intersected with {touching masses >= 0}: an eigenvalue when
/// no touching masses are present, projected power iteration otherwise.
SocSpectrum soc_min_eig(const Problem& problem, const DiscreteMeasure& u, const ActiveSets& sets,
                        const SocOptions& options = {});

struct SecondOrderReport {
  double theta = 0.0;
  std::vector<Matrix> hessians;
  double soc_min_eig = 0.0;       // full form (B1 second half)
  double weight_block_min = 0.0;  // weight + touching block (C1)
  Vector gram_eigenvalues;        // (k(x_i), Hess L k(x_j)) (C3)
  Vector kernel_singular_values;  // of [k(x_1) ... k(x_N)] (C4)
  double gram_min_eig = 0.0;
  bool b1 = false;
  bool c1 = false;
  bool c3 = false;
  bool c4 = false;
  bool convex_loss = false;
  bool strongly_convex_loss = false;
  bool strict_complementarity = false;
  bool sample_relative = false;
  /// The C-conditions are claimed equivalent to B1 only under these flags.
  bool c3_applicable() const { return convex_loss && strict_complementarity; }
  bool c4_applicable() const { return strongly_convex_loss && strict_complementarity; }
};

struct SecondOrderOptions {
  double theta_tol = kDefaultThetaTol;
  double soc_tol = kDefaultSocTol;
  double rank_tol = 1e-10;  // relative singular value cutoff
  double boundary_tol = kDefaultBoundaryTol;
  SocOptions soc;
};

SecondOrderReport check_C_conditions(const Problem& problem, const DiscreteMeasure& u,
                                     const ActiveSets& sets,
                                     const SecondOrderOptions& options = {});

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// -sum_j (1/lambda_j) V_j^T Hess p(x_j) V_j for admissible directions;
/// +infinity if the direction puts mass off A u I+- or has the wrong sign on
/// I+- (negative entries of mu_plus / mu_minus).
double second_subderivative(const Problem& problem, const DiscreteMeasure& u,
                            const ActiveSets& sets, const Direction& dir,
                            double match_tol = 1e-6);

/// Exact difference quotient
///   [G(lambda_j delta + t mu_t) - G(lambda_j delta) - t <p, mu_t>] / (t^2 / 2)
/// along mu_t = c delta_{x_j} + (lambda_j + t c)(delta_{x_j + tV/(lambda_j + tc)} - delta_{x_j}) / t
/// with G = alpha |.|_M. Tends to -(1/lambda_j) V^T Hess p(x_j) V as t -> 0.
double recovery_quotient(const Problem& problem, const DiscreteMeasure& u, std::size_t j,
                         const Point& V, double c, double t);

/// The same quotient for a full direction (sum over atoms plus the touching
/// masses, which are added unchanged).
double recovery_quotient(const Problem& problem, const DiscreteMeasure& u,
                         const ActiveSets& sets, const Direction& dir, double t);

/// Second-difference probe at atom j along the unit vector v:
///   mu_t = lambda_j (delta_{x_j - (t/lambda_j) v} - 2 delta_{x_j} + delta_{x_j + (t/lambda_j) v}) / (2t),
/// returns (G(u + t mu_t) - G(u)) / t^2 - <p, mu_t> / t, whose limit is
/// -s_j v^T Hess p(x_j) v / (2 |lambda_j|).
double ndc_probe(const Problem& problem, const DiscreteMeasure& u, std::size_t j, const Point& v,
                 double t);

/// Closed-form limit of ndc_probe.
double ndc_limit(const Problem& problem, const DiscreteMeasure& u, std::size_t j, const Point& v);

}  // namespace radon

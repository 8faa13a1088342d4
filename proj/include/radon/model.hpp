#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "radon/measures.hpp"

namespace radon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Gaussian bumps k_i(x) = exp(-sum_l (x_l - c_il)^2 / (2 b_l^2)) around m
/// centers (rows of `centers`). A scalar bandwidth is broadcast to all axes.
struct GaussianKernel {
  Matrix centers;  // m x d
  Vector bandwidth;  // d
};

/// Trigonometric features: for every frequency row w_f, the pair
/// (cos(w_f . x), sin(w_f . x)); output dimension 2F.
struct FourierKernel {
  Matrix frequencies;  // F x d
};

/// Smooth feature map k: Omega -> R^m together with its first and second
/// derivatives.
class Kernel {
 public:
  static Kernel gaussian(Matrix centers, double bandwidth);
  static Kernel gaussian(Matrix centers, Vector bandwidth);
  static Kernel fourier(Matrix frequencies);

  int dim() const;
  int output_dim() const;
  std::string family() const;
  const std::variant<GaussianKernel, FourierKernel>& params() const { return params_; }

  Vector eval(const Point& x) const;
  /// m x d Jacobian Dk(x).
  Matrix jacobian(const Point& x) const;
  /// d x d matrix sum_i y_i * Hess k_i(x).
  Matrix weighted_hessian(const Point& x, const Vector& y) const;

 private:
  explicit Kernel(std::variant<GaussianKernel, FourierKernel> p) : params_(std::move(p)) {}
  std::variant<GaussianKernel, FourierKernel> params_;
};

enum class LossFamily { kQuadratic, kNonconvexDemo };

/// Twice differentiable loss on R^m.
///
/// kQuadratic:     L(y) = 1/2 |y - y_d|^2
/// kNonconvexDemo: L(y) = 1/2 |y - y_d|^2 - beta * sum_i log(1 + (y_i - y_d,i)^2)
///
/// The demo perturbation is concave near y_d; for beta > 1/2 the loss is
/// nonconvex there while staying coercive.
class Loss {
 public:
  static Loss quadratic(Vector y_d);
  static Loss nonconvex_demo(Vector y_d, double beta);

  LossFamily family() const { return family_; }
  std::string family_name() const;
  const Vector& data() const { return y_d_; }
  double beta() const { return beta_; }
  int dim() const { return static_cast<int>(y_d_.size()); }

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  Matrix hessian(const Vector& y) const;
  /// Upper bound on the spectral norm of the Hessian over all of R^m.
  double curvature_bound() const;
  bool convex() const;
  bool strongly_convex() const;

 private:
  Loss(LossFamily f, Vector y_d, double beta) : family_(f), y_d_(std::move(y_d)), beta_(beta) {}
  LossFamily family_;
  Vector y_d_;
  double beta_ = 0.0;
};

/// min_u L(Ku) + alpha |u|_M over measures on `domain`.
struct Problem {
  Problem(Domain domain, Kernel kernel, Loss loss, double alpha);

  Domain domain;
  Kernel kernel;
  Loss loss;
  double alpha;
};

/// Ku = sum_j w_j k(x_j).
Vector apply_K(const Problem& problem, const DiscreteMeasure& u);

/// J(u) = L(Ku) + alpha |u|_M.
double objective(const Problem& problem, const DiscreteMeasure& u);

/// p(x) = -(k(x), grad L(Ku)) with analytic gradient and Hessian. Holds the
/// residual grad L(Ku) computed at construction; evaluations are reentrant.
class DualVariable {
 public:
  DualVariable(const Problem& problem, const DiscreteMeasure& u);
  /// Dual variable for a prescribed residual vector.
  DualVariable(const Problem& problem, Vector residual);

  double value(const Point& x) const;
  Vector gradient(const Point& x) const;
  Matrix hessian(const Point& x) const;

  const Vector& residual() const { return residual_; }
  const Problem& problem() const { return *problem_; }

 private:
  const Problem* problem_;
  Vector residual_;
};

DualVariable dual_variable(const Problem& problem, const DiscreteMeasure& u);

/// Scalar test function on R^d with known gradient, for the geometry checks.
struct TestFunction {
  std::string name;
  std::function<double(const Point&)> f;
  std::function<Vector(const Point&)> grad;
};

struct LipschitzReport {
  double sampled_lipschitz = 0.0;  // max difference quotient over sampled pairs
  double gradient_sup = 0.0;       // max |grad phi| over the same samples
  bool pass = false;               // sampled_lipschitz <= gradient_sup + 1e-9
};

/// Largest delta from a dyadic search (starting at diam(domain)) such that
/// |phi(y) - phi(x) - grad phi(x).(y - x)| <= eps |y - x| on all sampled pairs
/// with |y - x| <= delta. Returns 0 if no scale passes.
double uniform_taylor_check(const TestFunction& phi, const Domain& domain, double eps,
                            int samples = 2000, unsigned seed = 7);

/// Compares sampled difference quotients of phi against sup |grad phi| on
/// the same sample; on a convex box the former never exceeds the latter.
LipschitzReport lipschitz_embedding_check(const TestFunction& phi, const Domain& domain,
                                          int samples = 2000, unsigned seed = 11);

}  // namespace radon

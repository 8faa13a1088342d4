#include "radon/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "radon/errors.hpp"

namespace radon {

// ---------------------------------------------------------------- Kernel

Kernel Kernel::gaussian(Matrix centers, double bandwidth) {
  const auto d = centers.cols();
  return gaussian(std::move(centers), Vector::Constant(d, bandwidth));
}

Kernel Kernel::gaussian(Matrix centers, Vector bandwidth) {
  if (centers.rows() == 0 || centers.cols() == 0) throw Error("gaussian kernel needs centers");
  if (bandwidth.size() != centers.cols()) throw Error("bandwidth dimension mismatch");
  if ((bandwidth.array() <= 0.0).any()) throw Error("bandwidth must be positive");
  return Kernel(GaussianKernel{std::move(centers), std::move(bandwidth)});
}

Kernel Kernel::fourier(Matrix frequencies) {
  if (frequencies.rows() == 0 || frequencies.cols() == 0) {
    throw Error("fourier kernel needs frequencies");
  }
  return Kernel(FourierKernel{std::move(frequencies)});
}

int Kernel::dim() const {
  return std::visit(
      [](const auto& k) {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, GaussianKernel>) {
          return static_cast<int>(k.centers.cols());
        } else {
          return static_cast<int>(k.frequencies.cols());
        }
      },
      params_);
}

int Kernel::output_dim() const {
  return std::visit(
      [](const auto& k) {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, GaussianKernel>) {
          return static_cast<int>(k.centers.rows());
        } else {
          return static_cast<int>(2 * k.frequencies.rows());
        }
      },
      params_);
}

std::string Kernel::family() const {
  return std::holds_alternative<GaussianKernel>(params_) ? "gaussian" : "fourier";
}

Vector Kernel::eval(const Point& x) const {
  if (const auto* g = std::get_if<GaussianKernel>(&params_)) {
    const auto m = g->centers.rows();
    Vector out(m);
    const Vector inv2 = g->bandwidth.array().square().inverse();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vector z = x - g->centers.row(i).transpose();
      out[i] = std::exp(-0.5 * (z.array().square() * inv2.array()).sum());
    }
    return out;
  }
  const auto& f = std::get<FourierKernel>(params_);
  const auto F = f.frequencies.rows();
  Vector out(2 * F);
  for (Eigen::Index i = 0; i < F; ++i) {
    const double phase = f.frequencies.row(i).dot(x);
    out[2 * i] = std::cos(phase);
    out[2 * i + 1] = std::sin(phase);
  }
  return out;
}

Matrix Kernel::jacobian(const Point& x) const {
  const int d = dim();
  if (const auto* g = std::get_if<GaussianKernel>(&params_)) {
    const auto m = g->centers.rows();
    Matrix J(m, d);
    const Vector inv2 = g->bandwidth.array().square().inverse();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vector z = x - g->centers.row(i).transpose();
      const double k = std::exp(-0.5 * (z.array().square() * inv2.array()).sum());
      J.row(i) = (-k * z.array() * inv2.array()).matrix().transpose();
    }
    return J;
  }
  const auto& f = std::get<FourierKernel>(params_);
  const auto F = f.frequencies.rows();
  Matrix J(2 * F, d);
  for (Eigen::Index i = 0; i < F; ++i) {
    const double phase = f.frequencies.row(i).dot(x);
    J.row(2 * i) = -std::sin(phase) * f.frequencies.row(i);
    J.row(2 * i + 1) = std::cos(phase) * f.frequencies.row(i);
  }
  return J;
}

Matrix Kernel::weighted_hessian(const Point& x, const Vector& y) const {
  const int d = dim();
  Matrix H = Matrix::Zero(d, d);
  if (const auto* g = std::get_if<GaussianKernel>(&params_)) {
    const auto m = g->centers.rows();
    const Vector inv2 = g->bandwidth.array().square().inverse();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (y[i] == 0.0) continue;
      const Vector z = x - g->centers.row(i).transpose();
      const double k = std::exp(-0.5 * (z.array().square() * inv2.array()).sum());
      const Vector s = (z.array() * inv2.array()).matrix();
      H.noalias() += y[i] * k * (s * s.transpose());
      H.diagonal().array() -= y[i] * k * inv2.array();
    }
    return H;
  }
  const auto& f = std::get<FourierKernel>(params_);
  const auto F = f.frequencies.rows();
  for (Eigen::Index i = 0; i < F; ++i) {
    const Vector w = f.frequencies.row(i).transpose();
    const double phase = w.dot(x);
    const double coef = -(y[2 * i] * std::cos(phase) + y[2 * i + 1] * std::sin(phase));
    H.noalias() += coef * (w * w.transpose());
  }
  return H;
}

// ---------------------------------------------------------------- Loss

Loss Loss::quadratic(Vector y_d) { return Loss(LossFamily::kQuadratic, std::move(y_d), 0.0); }

Loss Loss::nonconvex_demo(Vector y_d, double beta) {
  if (!(beta >= 0.0)) throw Error("nonconvex_demo requires beta >= 0");
  return Loss(LossFamily::kNonconvexDemo, std::move(y_d), beta);
}

std::string Loss::family_name() const {
  return family_ == LossFamily::kQuadratic ? "quadratic" : "nonconvex_demo";
}

double Loss::value(const Vector& y) const {
  const Vector r = y - y_d_;
  double v = 0.5 * r.squaredNorm();
  if (family_ == LossFamily::kNonconvexDemo) v -= beta_ * (1.0 + r.array().square()).log().sum();
  return v;
}

Vector Loss::gradient(const Vector& y) const {
  Vector r = y - y_d_;
  if (family_ == LossFamily::kQuadratic) return r;
  return (r.array() - 2.0 * beta_ * r.array() / (1.0 + r.array().square())).matrix();
}

Matrix Loss::hessian(const Vector& y) const {
  const auto m = y_d_.size();
  if (family_ == LossFamily::kQuadratic) return Matrix::Identity(m, m);
  const Vector r2 = (y - y_d_).array().square();
  const Vector diag =
      (1.0 - 2.0 * beta_ * (1.0 - r2.array()) / (1.0 + r2.array()).square()).matrix();
  return diag.asDiagonal();
}

double Loss::curvature_bound() const {
  // d^2/dr^2 of -beta log(1 + r^2) ranges over [-2 beta, beta / 4].
  return family_ == LossFamily::kQuadratic ? 1.0 : 1.0 + 2.0 * beta_;
}

bool Loss::convex() const { return family_ == LossFamily::kQuadratic || beta_ <= 0.5; }

bool Loss::strongly_convex() const {
  return family_ == LossFamily::kQuadratic || beta_ < 0.5;
}

// ---------------------------------------------------------------- Problem

Problem::Problem(Domain dom, Kernel k, Loss l, double a)
    : domain(std::move(dom)), kernel(std::move(k)), loss(std::move(l)), alpha(a) {
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  if (kernel.dim() != domain.dim()) throw Error("kernel and domain dimensions differ");
  if (kernel.output_dim() != loss.dim()) throw Error("kernel output and data dimensions differ");
}

Vector apply_K(const Problem& problem, const DiscreteMeasure& u) {
  Vector y = Vector::Zero(problem.kernel.output_dim());
  for (const auto& a : u.atoms()) y.noalias() += a.w * problem.kernel.eval(a.x);
  return y;
}

double objective(const Problem& problem, const DiscreteMeasure& u) {
  return problem.loss.value(apply_K(problem, u)) + problem.alpha * tv_norm(u);
}

DualVariable::DualVariable(const Problem& problem, const DiscreteMeasure& u)
    : problem_(&problem), residual_(problem.loss.gradient(apply_K(problem, u))) {}

DualVariable::DualVariable(const Problem& problem, Vector residual)
    : problem_(&problem), residual_(std::move(residual)) {}

double DualVariable::value(const Point& x) const {
  return -problem_->kernel.eval(x).dot(residual_);
}

Vector DualVariable::gradient(const Point& x) const {
  return -problem_->kernel.jacobian(x).transpose() * residual_;
}

Matrix DualVariable::hessian(const Point& x) const {
  return -problem_->kernel.weighted_hessian(x, residual_);
}

DualVariable dual_variable(const Problem& problem, const DiscreteMeasure& u) {
  return DualVariable(problem, u);
}

// ---------------------------------------------------------------- geometry

namespace {

Point sample_point(const Domain& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Point x(dom.dim());
  for (int l = 0; l < dom.dim(); ++l) {
    x[l] = dom.lower()[l] + U(rng) * (dom.upper()[l] - dom.lower()[l]);
  }
  return x;
}

Point sample_direction(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Point v(d);
  do {
    for (int l = 0; l < d; ++l) v[l] = N(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// All sampled pairs at scale delta pass the first-order remainder bound?
bool taylor_holds(const TestFunction& phi, const Domain& dom, double eps, double delta,
                  int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_point(dom, rng);
    // A quarter of the pairs sit exactly at the scale being tested.
    const double r = (s % 4 == 0) ? delta : delta * U(rng);
    const Point y = dom.project(x + r * sample_direction(dom.dim(), rng));
    const double dist = (y - x).norm();
    if (dist == 0.0 || dist > delta) continue;
    const double rem = std::abs(phi.f(y) - phi.f(x) - phi.grad(x).dot(y - x));
    if (rem > eps * dist + 1e-14) return false;
  }
  return true;
}

}  // namespace

double uniform_taylor_check(const TestFunction& phi, const Domain& domain, double eps,
                            int samples, unsigned seed) {
  double delta = domain.diameter();
  if (taylor_holds(phi, domain, eps, delta, samples, seed)) return delta;
  double fail = delta;
  double pass = 0.0;
  for (int k = 0; k < 60; ++k) {
    delta *= 0.5;
    if (taylor_holds(phi, domain, eps, delta, samples, seed)) {
      pass = delta;
      break;
    }
    fail = delta;
  }
  if (pass == 0.0) return 0.0;
  // Bisect between the largest passing and smallest failing dyadic scale.
  for (int k = 0; k < 40; ++k) {
    const double mid = 0.5 * (pass + fail);
    if (taylor_holds(phi, domain, eps, mid, samples, seed)) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  return pass;
}

LipschitzReport lipschitz_embedding_check(const TestFunction& phi, const Domain& domain,
                                          int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LipschitzReport rep;
  constexpr int kSegmentPoints = 16;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_point(domain, rng);
    const Point y = (s % 2 == 0)
                        ? sample_point(domain, rng)
                        : domain.project(x + 1e-3 * U(rng) * sample_direction(domain.dim(), rng));
    const double dist = (y - x).norm();
    // The mean value point lies on [x, y]; sampling the segment keeps the
    // gradient bound honest for this pair.
    for (int k = 0; k <= kSegmentPoints; ++k) {
      const Point z = x + (static_cast<double>(k) / kSegmentPoints) * (y - x);
      rep.gradient_sup = std::max(rep.gradient_sup, phi.grad(z).norm());
    }
    if (dist > 0.0) {
      rep.sampled_lipschitz =
          std::max(rep.sampled_lipschitz, std::abs(phi.f(y) - phi.f(x)) / dist);
    }
  }
  rep.pass = rep.sampled_lipschitz <= rep.gradient_sup + 1e-9;
  return rep;
}

}  // namespace radon

#include "radon/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "radon/errors.hpp"

namespace radon {

Vector min_norm_certificate(const Kernel& kernel, const std::vector<CertificateNode>& nodes) {
  const int d = kernel.dim();
  const int m = kernel.output_dim();
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (const auto& node : nodes) {
    rows.push_back(kernel.eval(node.x));
    rhs.push_back(node.value);
    const Matrix J = kernel.jacobian(node.x);
    for (int l = 0; l < d; ++l) {
      rows.push_back(J.col(l));
      rhs.push_back(0.0);
    }
    if (node.flat) {
      std::vector<Matrix> hess;
      for (int i = 0; i < m; ++i) hess.push_back(kernel.weighted_hessian(node.x, Vector::Unit(m, i)));
      for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
          Vector row(m);
          for (int i = 0; i < m; ++i) row[i] = hess[static_cast<std::size_t>(i)](a, b);
          rows.push_back(row);
          rhs.push_back(0.0);
        }
      }
    }
  }
  Matrix A(static_cast<Eigen::Index>(rows.size()), m);
  Vector b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    b[static_cast<Eigen::Index>(r)] = rhs[r];
  }
  const Vector w = A.completeOrthogonalDecomposition().solve(b);
  if ((A * w - b).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
    throw Error("min_norm_certificate: interpolation constraints are inconsistent");
  }
  return w;
}

namespace {

std::vector<Point> verification_grid(const Domain& domain) {
  const int d = domain.dim();
  const int n = d == 1 ? 4000 : d == 2 ? 200 : 24;
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Point x(d);
    for (int l = 0; l < d; ++l) {
      x[l] = domain.lower()[l] +
             (domain.upper()[l] - domain.lower()[l]) * idx[static_cast<std::size_t>(l)] / n;
    }
    out.push_back(x);
    int l = 0;
    while (l < d && ++idx[static_cast<std::size_t>(l)] > n) idx[static_cast<std::size_t>(l++)] = 0;
    if (l == d) break;
  }
  return out;
}

Matrix row_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

Matrix linspace_centers(double a, double b, int n) {
  return Vector::LinSpaced(n, a, b);
}

Point pt(double x) { return Point::Constant(1, x); }

DiscreteMeasure measure_1d(std::initializer_list<std::pair<double, double>> atoms) {
  std::vector<Atom> raw;
  for (const auto& [x, w] : atoms) raw.push_back(Atom{pt(x), w});
  return DiscreteMeasure::canonicalize(raw, 1);
}

}  // namespace

Scenario stationary_instance(std::string name, Domain domain, Kernel kernel, double alpha,
                             const DiscreteMeasure& u, bool flat,
                             const std::vector<CertificateNode>& touching) {
  std::vector<CertificateNode> nodes;
  for (const auto& a : u.atoms()) nodes.push_back(CertificateNode{a.x, a.w > 0 ? alpha : -alpha, flat});
  for (const auto& t : touching) nodes.push_back(t);
  const Vector w = min_norm_certificate(kernel, nodes);

  Vector Ku = Vector::Zero(kernel.output_dim());
  for (const auto& a : u.atoms()) Ku += a.w * kernel.eval(a.x);
  const Vector y_d = Ku + w;

  double worst = 0.0;
  Point worst_x;
  for (const auto& x : verification_grid(domain)) {
    const double v = std::abs(kernel.eval(x).dot(w));
    if (v > worst) {
      worst = v;
      worst_x = x;
    }
  }
  if (worst > alpha * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "scenario " << name << ": certificate reaches |p| = " << worst << " > alpha = " << alpha
        << " at (" << worst_x.transpose() << ")";
    throw Error(msg.str());
  }
  Scenario s{std::move(name), "", Problem(std::move(domain), std::move(kernel), Loss::quadratic(y_d), alpha),
             u, flat};
  return s;
}

Scenario exact_gaussian_1d() {
  Problem problem(Domain::unit(1), Kernel::gaussian(row_matrix({{0.5}}), 0.5),
                  Loss::quadratic(Vector::Constant(1, 2.5)), 0.5);
  Scenario s{"exact_gaussian_1d", "single sensor, closed-form stationary point", std::move(problem),
             measure_1d({{0.5, 2.0}}), false};
  return s;
}

Scenario exact_gaussian_2d() {
  Vector bw(2);
  bw << 1.0 / std::sqrt(3.0), 1.0;
  Problem problem(Domain::unit(2), Kernel::gaussian(row_matrix({{0.5, 0.5}}), bw),
                  Loss::quadratic(Vector::Constant(1, 2.0)), 1.0);
  Point x(2);
  x << 0.5, 0.5;
  Scenario s{"exact_gaussian_2d", "anisotropic single sensor, closed-form stationary point",
             std::move(problem), DiscreteMeasure::dirac(x, 1.0), false};
  return s;
}

Scenario nondegenerate_two_spike() {
  Scenario s = stationary_instance("nondegenerate", Domain::unit(1),
                                   Kernel::gaussian(linspace_centers(0.0, 1.0, 21), 0.08), 0.05,
                                   measure_1d({{0.3, 1.0}, {0.65, -0.7}}));
  s.description = "two spikes of opposite sign, strict certificate";
  return s;
}

Scenario nondegenerate_three_spike() {
  Scenario s = stationary_instance("nondegenerate_three_spike", Domain::unit(1),
                                   Kernel::gaussian(linspace_centers(0.0, 1.0, 21), 0.08), 0.05,
                                   measure_1d({{0.25, 0.8}, {0.5, 1.2}, {0.78, -0.9}}));
  s.description = "three spikes of mixed sign, strict certificate";
  return s;
}

Scenario touching_point() {
  Scenario s = stationary_instance("touching_point", Domain::unit(1),
                                   Kernel::gaussian(linspace_centers(0.0, 1.0, 21), 0.08), 0.05,
                                   measure_1d({{0.3, 1.0}}), false,
                                   {CertificateNode{pt(0.7), 0.05, false}});
  s.description = "one spike and an inactive point where p touches alpha";
  return s;
}

Scenario flat_hessian(double center, double bandwidth, double alpha, int sensors,
                      double half_width) {
  Scenario s = stationary_instance(
      "flat_hessian", Domain::unit(1),
      Kernel::gaussian(linspace_centers(center - half_width, center + half_width, sensors), bandwidth),
      alpha, measure_1d({{center, 1.0}}), true);
  s.description = "one spike where the dual variable has zero curvature";
  return s;
}

Scenario duplicated_columns(double x0, double alpha, double w0, double w1) {
  const double two_pi = 2.0 * std::numbers::pi;
  Matrix freq = row_matrix({{two_pi}, {2.0 * two_pi}, {3.0 * two_pi}});
  Domain domain(pt(0.0), pt(2.0));
  Scenario s = stationary_instance("duplicated_columns", domain, Kernel::fourier(freq), alpha,
                                   measure_1d({{x0, w0}, {x0 + 1.0, w1}}));
  s.degenerate = true;
  s.description = "period-one Fourier features with atoms one period apart";
  return s;
}

Scenario two_spike_recovery(double alpha) {
  const Kernel kernel = Kernel::gaussian(linspace_centers(0.0, 1.0, 16), 0.08);
  DiscreteMeasure truth = measure_1d({{0.3, 1.0}, {0.7, 0.6}});
  Vector y = Vector::Zero(kernel.output_dim());
  for (const auto& a : truth.atoms()) y += a.w * kernel.eval(a.x);
  Scenario s{"two_spike_recovery", "noiseless data from two positive spikes",
             Problem(Domain::unit(1), kernel, Loss::quadratic(y), alpha), truth, false};
  return s;
}

Scenario below_threshold() {
  const Kernel kernel = Kernel::gaussian(linspace_centers(0.0, 1.0, 16), 0.08);
  Vector y(kernel.output_dim());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = 0.01 * std::sin(3.0 * static_cast<double>(i));
  Scenario s{"below_threshold", "weak data, the zero measure is optimal",
             Problem(Domain::unit(1), kernel, Loss::quadratic(y), 0.5), DiscreteMeasure(1), false};
  return s;
}

std::vector<Scenario> nondegenerate_suite() {
  return {exact_gaussian_1d(), exact_gaussian_2d(), nondegenerate_two_spike(),
          nondegenerate_three_spike(), touching_point()};
}

std::vector<Scenario> degenerate_suite() {
  std::vector<Scenario> out;
  out.push_back(flat_hessian());
  out.push_back(flat_hessian(0.5, 0.12, 0.2, 13, 0.3));
  out.push_back(flat_hessian(0.45, 0.09, 0.05, 19, 0.36));
  out.push_back(duplicated_columns());
  out.push_back(duplicated_columns(0.3, 0.5, 0.7, 0.7));
  out[1].name = "flat_hessian_wide";
  out[2].name = "flat_hessian_offset";
  out[4].name = "duplicated_columns_balanced";
  return out;
}

std::vector<Scenario> bundled_scenarios() {
  Scenario nd = nondegenerate_two_spike();
  nd.measure.reset();
  return {nd, flat_hessian()};
}

}  // namespace radon

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "radon/errors.hpp"

using namespace radon;
using namespace testing;

namespace {

Vector fd_gradient(const DualVariable& p, const Point& x, double h) {
  Vector g(x.size());
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    Point a = x, b = x;
    a[l] += h;
    b[l] -= h;
    g[l] = (p.value(a) - p.value(b)) / (2 * h);
  }
  return g;
}

Matrix fd_hessian(const DualVariable& p, const Point& x, double h) {
  Matrix H(x.size(), x.size());
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    Point a = x, b = x;
    a[l] += h;
    b[l] -= h;
    H.col(l) = (p.gradient(a) - p.gradient(b)) / (2 * h);
  }
  return H;
}

std::vector<Problem> derivative_instances() {
  std::mt19937_64 rng(55);
  std::vector<Problem> out;
  out.emplace_back(Domain::unit(1), random_gaussian(rng, 1, 9, 0.15),
                   Loss::quadratic(random_vector(rng, 9)), 0.1);
  out.emplace_back(Domain::unit(2), random_gaussian(rng, 2, 12, 0.3),
                   Loss::quadratic(random_vector(rng, 12)), 0.1);
  Vector bw(2);
  bw << 0.2, 0.45;
  Matrix centers(5, 2);
  centers << 0.1, 0.2, 0.5, 0.5, 0.9, 0.3, 0.3, 0.8, 0.7, 0.9;
  out.emplace_back(Domain::unit(2), Kernel::gaussian(centers, bw),
                   Loss::nonconvex_demo(random_vector(rng, 5), 0.8), 0.1);
  Matrix freq(4, 2);
  freq << 1, 0, 0, 2, 3, 1, -2, 5;
  out.emplace_back(Domain::unit(2), Kernel::fourier(freq), Loss::quadratic(random_vector(rng, 8)),
                   0.1);
  return out;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("kernel shapes and validation") {
    Matrix c(3, 2);
    c << 0, 0, 1, 1, 0.5, 0.2;
    const Kernel k = Kernel::gaussian(c, 0.3);
    CHECK(k.dim() == 2);
    CHECK(k.output_dim() == 3);
    CHECK(k.family() == "gaussian");
    CHECK(k.eval(p2(0, 0))[0] == doctest::Approx(1.0));
    CHECK(k.jacobian(p2(0.3, 0.4)).rows() == 3);
    CHECK(k.jacobian(p2(0.3, 0.4)).cols() == 2);
    Matrix f(2, 1);
    f << 1, 2;
    const Kernel fk = Kernel::fourier(f);
    CHECK(fk.output_dim() == 4);
    CHECK(fk.eval(p1(0.0)).isApprox(Vector::Map(std::array<double, 4>{1, 0, 1, 0}.data(), 4)));
    CHECK_THROWS_AS(Kernel::gaussian(c, -1.0), Error);
  }

  TEST_CASE("problem validation") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(4, 0, 1), 0.2);
    CHECK_THROWS_AS(Problem(Domain::unit(1), k, Loss::quadratic(Vector::Zero(4)), 0.0), Error);
    CHECK_THROWS_AS(Problem(Domain::unit(1), k, Loss::quadratic(Vector::Zero(3)), 1.0), Error);
    CHECK_THROWS_AS(Problem(Domain::unit(2), k, Loss::quadratic(Vector::Zero(4)), 1.0), Error);
  }

  TEST_CASE("apply_K examples") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(5, 0, 1), 0.2);
    const Problem P(Domain::unit(1), k, Loss::quadratic(Vector::Zero(5)), 1.0);
    CHECK(apply_K(P, m1({{0.3, 1}})).isApprox(k.eval(p1(0.3))));
    CHECK(apply_K(P, m1({{0.3, 2}, {0.8, -1}})).isApprox(2 * k.eval(p1(0.3)) - k.eval(p1(0.8))));
    CHECK(apply_K(P, DiscreteMeasure(1)).isZero());
  }

  TEST_CASE("objective examples") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(5, 0, 1), 0.2);
    const Vector y = Vector::LinSpaced(5, 1, 2);
    const Problem P(Domain::unit(1), k, Loss::quadratic(y), 1.0);
    CHECK(objective(P, DiscreteMeasure(1)) == doctest::Approx(0.5 * y.squaredNorm()));
    const Problem Q(Domain::unit(1), k, Loss::quadratic(k.eval(p1(0.4))), 1.0);
    CHECK(objective(Q, m1({{0.4, 1}})) == doctest::Approx(1.0));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto u = random_measure(rng, 1, 1 + trial % 6);
      double direct = 0.0;
      Vector r = -y;
      double tv = 0.0;
      for (const auto& a : u.atoms()) {
        for (int i = 0; i < 5; ++i) {
          const double c = static_cast<double>(i) / 4.0;
          r[i] += a.w * std::exp(-(a.x[0] - c) * (a.x[0] - c) / (2 * 0.04));
        }
        tv += std::abs(a.w);
      }
      direct = 0.5 * r.squaredNorm() + tv;
      CHECK(std::abs(objective(P, u) - direct) <= 1e-12 * (1 + std::abs(direct)));
    }
  }

  TEST_CASE("dual variable at zero is the data correlation") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(7, 0, 1), 0.1);
    const Vector y = Vector::LinSpaced(7, -1, 2);
    const Problem P(Domain::unit(1), k, Loss::quadratic(y), 1.0);
    const DualVariable p = dual_variable(P, DiscreteMeasure(1));
    for (double x : {0.0, 0.13, 0.5, 0.91}) {
      CHECK(p.value(p1(x)) == doctest::Approx(k.eval(p1(x)).dot(y)));
    }
  }

  TEST_CASE("analytic derivatives match central differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (const auto& P : derivative_instances()) {
      const int d = P.domain.dim();
      const auto u = random_measure(rng, d, 3);
      const DualVariable p(P, u);
      for (int s = 0; s < 100; ++s) {
        Point x(d);
        for (int l = 0; l < d; ++l) x[l] = U(rng);
        const Vector g = p.gradient(x);
        CHECK((g - fd_gradient(p, x, 1e-5)).norm() <= 1e-6 * (1 + g.norm()));
        const Matrix H = p.hessian(x);
        CHECK((H - fd_hessian(p, x, 1e-4)).norm() <= 1e-4 * (1 + H.norm()));
        CHECK((H - H.transpose()).norm() <= 1e-12 * (1 + H.norm()));
      }
    }
  }

  TEST_CASE("finite-difference error is second order") {
    const auto instances = derivative_instances();
    const Problem& P = instances[1];
    const DualVariable p(P, DiscreteMeasure::canonicalize({Atom{p2(0.2, 0.3), 1.0}}, 2));
    const Point x = p2(0.37, 0.61);
    const double e1 = (p.gradient(x) - fd_gradient(p, x, 1e-2)).norm();
    const double e2 = (p.gradient(x) - fd_gradient(p, x, 5e-3)).norm();
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    const double h1 = (p.hessian(x) - fd_hessian(p, x, 1e-2)).norm();
    const double h2 = (p.hessian(x) - fd_hessian(p, x, 5e-3)).norm();
    CHECK(h1 / h2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("losses: derivatives, convexity flags, curvature bound") {
    std::mt19937_64 rng(5);
    const Vector y = random_vector(rng, 4);
    for (double beta : {0.0, 0.3, 0.5, 0.9}) {
      const Loss L = Loss::nonconvex_demo(y, beta);
      for (int s = 0; s < 20; ++s) {
        const Vector z = y + random_vector(rng, 4, 1.5);
        Vector g(4);
        Matrix H(4, 4);
        for (int i = 0; i < 4; ++i) {
          Vector a = z, b = z;
          a[i] += 1e-6;
          b[i] -= 1e-6;
          g[i] = (L.value(a) - L.value(b)) / 2e-6;
          H.col(i) = (L.gradient(a) - L.gradient(b)) / 2e-6;
        }
        CHECK((g - L.gradient(z)).norm() <= 1e-7);
        CHECK((H - L.hessian(z)).norm() <= 1e-6);
        const auto eig = Eigen::SelfAdjointEigenSolver<Matrix>(L.hessian(z)).eigenvalues();
        CHECK(eig.cwiseAbs().maxCoeff() <= L.curvature_bound() + 1e-12);
        if (L.convex()) CHECK(eig.minCoeff() >= -1e-12);
      }
      // The Hessian at the data point is (1 - 2 beta) Id.
      CHECK(L.hessian(y)(0, 0) == doctest::Approx(1 - 2 * beta));
      CHECK(L.convex() == (beta <= 0.5));
      CHECK(L.strongly_convex() == (beta < 0.5));
    }
    const Loss Q = Loss::quadratic(y);
    CHECK(Q.hessian(y + Vector::Ones(4)).isIdentity());
    CHECK(Q.strongly_convex());
  }

  TEST_CASE("property: K is linear") {
    std::mt19937_64 rng(17);
    const Problem P(Domain::unit(2), random_gaussian(rng, 2, 10, 0.25),
                    Loss::quadratic(Vector::Zero(10)), 1.0);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int trial = 0; trial < 30; ++trial) {
      const auto u = random_measure(rng, 2, 4), v = random_measure(rng, 2, 3);
      const double a = U(rng), b = U(rng);
      const Vector lhs = apply_K(P, a * u + b * v);
      const Vector rhs = a * apply_K(P, u) + b * apply_K(P, v);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
    }
  }

  TEST_CASE("property: quadratic-loss dual depends only on the residual") {
    const double two_pi = 2 * std::numbers::pi;
    Matrix f(3, 1);
    f << two_pi, 2 * two_pi, 3 * two_pi;
    const Problem P(Domain(p1(0), p1(2)), Kernel::fourier(f), Loss::quadratic(Vector::Ones(6)), 1.0);
    // Columns one period apart coincide, so these measures have equal images.
    const DualVariable a(P, m1({{0.3, 1.5}}));
    const DualVariable b(P, m1({{1.3, 1.0}, {0.3, 0.5}}));
    for (double x : {0.0, 0.41, 1.2, 1.77}) {
      CHECK(std::abs(a.value(p1(x)) - b.value(p1(x))) <= 1e-12);
    }
  }

  TEST_CASE("uniform Taylor check") {
    const Domain unit = Domain::unit(1);
    const TestFunction sq{"x^2", [](const Point& x) { return x[0] * x[0]; },
                          [](const Point& x) { return Vector::Constant(1, 2 * x[0]); }};
    CHECK(uniform_taylor_check(sq, unit, 0.01) >= 0.01);
    const double two_pi = 2 * std::numbers::pi;
    const TestFunction sn{"sin", [=](const Point& x) { return std::sin(two_pi * x[0]); },
                          [=](const Point& x) {
                            return Vector::Constant(1, two_pi * std::cos(two_pi * x[0]));
                          }};
    CHECK(uniform_taylor_check(sn, unit, 0.1) > 0.0);
    const TestFunction aff{"affine", [](const Point& x) { return 3 * x[0] - 1; },
                           [](const Point&) { return Vector::Constant(1, 3.0); }};
    CHECK(uniform_taylor_check(aff, unit, 1e-3) == doctest::Approx(unit.diameter()));
    const Domain sq2 = Domain::unit(2);
    const TestFunction aff2{"affine2", [](const Point& x) { return x[0] - 2 * x[1]; },
                            [](const Point&) { return p2(1, -2); }};
    CHECK(uniform_taylor_check(aff2, sq2, 1e-3) == doctest::Approx(sq2.diameter()));
  }

  TEST_CASE("Lipschitz embedding check") {
    const Domain unit = Domain::unit(1);
    const double two_pi = 2 * std::numbers::pi;
    const TestFunction sn{"sin", [=](const Point& x) { return std::sin(two_pi * x[0]); },
                          [=](const Point& x) {
                            return Vector::Constant(1, two_pi * std::cos(two_pi * x[0]));
                          }};
    auto r = lipschitz_embedding_check(sn, unit);
    CHECK(r.pass);
    CHECK(r.sampled_lipschitz <= two_pi + 1e-9);
    const TestFunction c{"const", [](const Point&) { return 2.0; },
                         [](const Point&) { return Vector::Zero(1); }};
    r = lipschitz_embedding_check(c, unit);
    CHECK(r.pass);
    CHECK(r.sampled_lipschitz == 0.0);
    const TestFunction pw{"pow1.5",
                          [](const Point& x) { return std::pow(std::abs(x[0] - 0.5), 1.5); },
                          [](const Point& x) {
                            const double t = x[0] - 0.5;
                            return Vector::Constant(1, 1.5 * std::sqrt(std::abs(t)) * (t < 0 ? -1 : 1));
                          }};
    r = lipschitz_embedding_check(pw, unit);
    CHECK(r.pass);
    CHECK(r.sampled_lipschitz <= r.gradient_sup + 1e-9);
  }
}

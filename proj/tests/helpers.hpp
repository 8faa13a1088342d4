#pragma once

#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "radon/measures.hpp"
#include "radon/model.hpp"

namespace testing {

using radon::Atom;
using radon::DiscreteMeasure;
using radon::Point;

inline Point p1(double x) { return Point::Constant(1, x); }

inline Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

inline DiscreteMeasure m1(std::initializer_list<std::pair<double, double>> atoms) {
  std::vector<Atom> raw;
  for (const auto& [x, w] : atoms) raw.push_back(Atom{p1(x), w});
  return DiscreteMeasure::canonicalize(raw, 1);
}

/// Random measure with n atoms in [0, scale]^d, weights of random sign and
/// magnitude in [0.1, 2].
inline DiscreteMeasure random_measure(std::mt19937_64& rng, int d, int n, double scale = 1.0,
                                      bool signed_weights = true) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Atom> raw;
  for (int i = 0; i < n; ++i) {
    Point x(d);
    for (int l = 0; l < d; ++l) x[l] = scale * U(rng);
    double w = 0.1 + 1.9 * U(rng);
    if (signed_weights && U(rng) < 0.5) w = -w;
    raw.push_back(Atom{x, w});
  }
  return DiscreteMeasure::canonicalize(raw, d);
}

/// Gaussian kernel with m random centers in [0,1]^d.
inline radon::Kernel random_gaussian(std::mt19937_64& rng, int d, int m, double b) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::MatrixXd c(m, d);
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < d; ++l) c(i, l) = U(rng);
  }
  return radon::Kernel::gaussian(c, b);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

}  // namespace testing

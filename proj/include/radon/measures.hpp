#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace radon {

using Point = Eigen::VectorXd;

inline constexpr double kDefaultMergeTol = 1e-9;
inline constexpr double kDefaultWeightTol = 1e-12;

/// Axis-aligned box [lower, upper] in R^d. Convex, hence uniformly locally
/// quasiconvex with constant 1 at every scale.
class Domain {
 public:
  Domain(Point lower, Point upper);

  /// The unit interval or square/cube [0,1]^d.
  static Domain unit(int dim);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }

  bool contains(const Point& x, double tol = 0.0) const;
  Point project(const Point& x) const;
  /// Distance from x to the boundary (0 outside or on it).
  double distance_to_boundary(const Point& x) const;
  double diameter() const { return (upper_ - lower_).norm(); }

 private:
  Point lower_;
  Point upper_;
};

struct Atom {
  Point x;
  double w = 0.0;
};

/// Finite signed sum of Dirac masses. Instances produced by canonicalize()
/// have pairwise separated positions, no (near) zero weights and
/// lexicographically sorted positions. The empty list is the zero measure.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// The zero measure in dimension d.
  explicit DiscreteMeasure(int dim) : dim_(dim) {}

  /// Merge atoms closer than merge_tol (Euclidean) by summing weights, drop
  /// |w| <= weight_tol, sort lexicographically. Throws DomainError when an
  /// atom lies outside `domain`.
  static DiscreteMeasure canonicalize(const std::vector<Atom>& raw, const Domain& domain,
                                      double merge_tol = kDefaultMergeTol,
                                      double weight_tol = kDefaultWeightTol);
  /// Same, without a domain check (dimension taken from the atoms or `dim`).
  static DiscreteMeasure canonicalize(const std::vector<Atom>& raw, int dim,
                                      double merge_tol = kDefaultMergeTol,
                                      double weight_tol = kDefaultWeightTol);

  static DiscreteMeasure dirac(const Point& x, double w = 1.0);

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  double total_mass() const;
  bool nonnegative() const;

  DiscreteMeasure operator+(const DiscreteMeasure& other) const;
  DiscreteMeasure operator-(const DiscreteMeasure& other) const;
  DiscreteMeasure operator*(double c) const;

  /// Integral of a function against the measure.
  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.w * f(a.x);
    return s;
  }

 private:
  int dim_ = 0;
  std::vector<Atom> atoms_;
};

inline DiscreteMeasure operator*(double c, const DiscreteMeasure& u) { return u * c; }

/// Sum of absolute weights.
double tv_norm(const DiscreteMeasure& u);

/// u = u_plus - u_minus with both parts nonnegative and disjointly supported.
std::pair<DiscreteMeasure, DiscreteMeasure> jordan_decompose(const DiscreteMeasure& u);

/// Lexicographic order on points of equal dimension.
bool lex_less(const Point& a, const Point& b);

}  // namespace radon

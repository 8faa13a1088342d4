#include "radon/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radon/errors.hpp"

namespace radon {

Domain::Domain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw DomainError("domain bounds must be nonempty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw DomainError("domain requires lower < upper in every coordinate");
    }
  }
}

Domain Domain::unit(int dim) { return Domain(Point::Zero(dim), Point::Ones(dim)); }

bool Domain::contains(const Point& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

Point Domain::project(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

double Domain::distance_to_boundary(const Point& x) const {
  if (!contains(x)) return 0.0;
  return std::min((x - lower_).minCoeff(), (upper_ - x).minCoeff());
}

bool lex_less(const Point& a, const Point& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x, double w) {
  DiscreteMeasure u(static_cast<int>(x.size()));
  if (w != 0.0) u.atoms_.push_back(Atom{x, w});
  return u;
}

DiscreteMeasure DiscreteMeasure::canonicalize(const std::vector<Atom>& raw, int dim,
                                              double merge_tol, double weight_tol) {
  if (merge_tol < 0.0) throw Error("merge_tol must be nonnegative");
  DiscreteMeasure out(dim);
  std::vector<Atom> sorted = raw;
  for (const auto& a : sorted) {
    if (a.x.size() != dim) throw DomainError("atom dimension does not match measure dimension");
    if (!std::isfinite(a.w) || !a.x.allFinite()) throw DomainError("atom has non-finite entries");
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
  std::vector<Atom> reps;
  for (const auto& a : sorted) {
    bool merged = false;
    for (auto& r : reps) {
      if ((r.x - a.x).norm() <= merge_tol) {
        r.w += a.w;
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(a);
  }
  for (auto& r : reps) {
    if (std::abs(r.w) > weight_tol) out.atoms_.push_back(std::move(r));
  }
  return out;
}

DiscreteMeasure DiscreteMeasure::canonicalize(const std::vector<Atom>& raw, const Domain& domain,
                                              double merge_tol, double weight_tol) {
  for (const auto& a : raw) {
    if (!domain.contains(a.x)) {
      std::ostringstream msg;
      msg << "atom at (" << a.x.transpose() << ") lies outside the domain";
      throw DomainError(msg.str());
    }
  }
  return canonicalize(raw, domain.dim(), merge_tol, weight_tol);
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.w;
  return s;
}

bool DiscreteMeasure::nonnegative() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.w >= 0.0; });
}

DiscreteMeasure DiscreteMeasure::operator+(const DiscreteMeasure& other) const {
  std::vector<Atom> all = atoms_;
  all.insert(all.end(), other.atoms_.begin(), other.atoms_.end());
  const int d = dim_ != 0 ? dim_ : other.dim_;
  return canonicalize(all, d);
}

DiscreteMeasure DiscreteMeasure::operator-(const DiscreteMeasure& other) const {
  return *this + other * -1.0;
}

DiscreteMeasure DiscreteMeasure::operator*(double c) const {
  DiscreteMeasure out(dim_);
  if (c == 0.0) return out;
  out.atoms_ = atoms_;
  for (auto& a : out.atoms_) a.w *= c;
  return out;
}

double tv_norm(const DiscreteMeasure& u) {
  double s = 0.0;
  for (const auto& a : u.atoms()) s += std::abs(a.w);
  return s;
}

std::pair<DiscreteMeasure, DiscreteMeasure> jordan_decompose(const DiscreteMeasure& u) {
  std::vector<Atom> plus, minus;
  for (const auto& a : u.atoms()) {
    if (a.w > 0.0) {
      plus.push_back(a);
    } else if (a.w < 0.0) {
      minus.push_back(Atom{a.x, -a.w});
    }
  }
  // Both lists are already separated and sorted; canonicalize with zero
  // tolerances only to build the value.
  return {DiscreteMeasure::canonicalize(plus, u.dim(), 0.0, 0.0),
          DiscreteMeasure::canonicalize(minus, u.dim(), 0.0, 0.0)};
}

}  // namespace radon

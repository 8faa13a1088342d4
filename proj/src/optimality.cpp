#include "radon/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "radon/errors.hpp"
#include "radon/parallel.hpp"

namespace radon {

namespace {

constexpr double kRoundoff = 4.0 * std::numeric_limits<double>::epsilon();

std::vector<int> unravel(std::size_t k, int per_axis, int d) {
  std::vector<int> idx(d);
  for (int l = 0; l < d; ++l) {
    idx[l] = static_cast<int>(k % per_axis);
    k /= per_axis;
  }
  return idx;
}

std::size_t ravel(const std::vector<int>& idx, int per_axis) {
  std::size_t k = 0;
  for (int l = static_cast<int>(idx.size()) - 1; l >= 0; --l) k = k * per_axis + idx[l];
  return k;
}

// Values of sign * p on the grid that are >= all of their (up to 3^d - 1)
// neighbours.
std::vector<std::size_t> grid_local_maxima(const std::vector<double>& vals, int per_axis, int d) {
  std::vector<std::size_t> out;
  const std::size_t total = vals.size();
  std::vector<int> offs(d);
  const std::size_t n_off = static_cast<std::size_t>(std::pow(3, d));
  for (std::size_t k = 0; k < total; ++k) {
    const auto idx = unravel(k, per_axis, d);
    bool is_max = true;
    for (std::size_t o = 0; o < n_off && is_max; ++o) {
      auto nb = idx;
      std::size_t rem = o;
      bool self = true;
      bool inside = true;
      for (int l = 0; l < d; ++l) {
        const int off = static_cast<int>(rem % 3) - 1;
        rem /= 3;
        if (off != 0) self = false;
        nb[l] += off;
        if (nb[l] < 0 || nb[l] >= per_axis) inside = false;
      }
      if (self || !inside) continue;
      if (vals[ravel(nb, per_axis)] > vals[k]) is_max = false;
    }
    if (is_max) out.push_back(k);
  }
  return out;
}

bool value_then_lex(const LocalMax& a, const LocalMax& b) {
  if (a.value != b.value) return a.value > b.value;
  return lex_less(a.x, b.x);
}

}  // namespace

std::vector<Point> grid_nodes(const Domain& domain, int grid_n) {
  if (grid_n < 1) throw Error("grid_n must be positive");
  const int d = domain.dim();
  const int per_axis = grid_n + 1;
  std::size_t total = 1;
  for (int l = 0; l < d; ++l) total *= per_axis;
  std::vector<Point> nodes;
  nodes.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    const auto idx = unravel(k, per_axis, d);
    Point x(d);
    for (int l = 0; l < d; ++l) {
      x[l] = idx[l] == grid_n ? domain.upper()[l]
                              : domain.lower()[l] + (domain.upper()[l] - domain.lower()[l]) *
                                                        idx[l] / grid_n;
    }
    nodes.push_back(std::move(x));
  }
  return nodes;
}

LocalMax maximize_locally(const DualVariable& dual, const Domain& domain, const Point& start,
                          int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  Point x = domain.project(start);
  double f = s * dual.value(x);
  const double max_step = 0.1 * domain.diameter();
  for (int it = 0; it < 200; ++it) {
    const Vector g = s * dual.gradient(x);
    const Matrix H = s * dual.hessian(x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    const bool concave = eig.eigenvalues().maxCoeff() < -1e-12 * (1.0 + H.norm());
    bool moved = false;
    for (int mode = concave ? 0 : 1; mode < 2 && !moved; ++mode) {
      Vector step;
      if (mode == 0) {
        step = -eig.eigenvectors() *
               (eig.eigenvectors().transpose() * g).cwiseQuotient(eig.eigenvalues());
      } else {
        const double gn = g.norm();
        if (gn == 0.0) break;
        step = (max_step / gn) * g;
      }
      if (step.norm() > max_step) step *= max_step / step.norm();
      double tau = 1.0;
      for (int bt = 0; bt < 60; ++bt, tau *= 0.5) {
        const Point xn = domain.project(x + tau * step);
        const double fn = s * dual.value(xn);
        const double slack = mode == 0 ? kRoundoff * (1.0 + std::abs(f)) : 0.0;
        if (fn > f || (mode == 0 && fn >= f - slack && (xn - x).norm() > 0.0)) {
          const double moved_by = (xn - x).norm();
          x = xn;
          f = std::max(f, fn);
          moved = moved_by > 0.0;
          if (moved_by < 1e-14 * (1.0 + x.norm())) return LocalMax{x, s * dual.value(x)};
          break;
        }
      }
    }
    if (!moved) break;
  }
  return LocalMax{x, s * dual.value(x)};
}

std::vector<LocalMax> scan_extrema(const DualVariable& dual, const Domain& domain, int grid_n,
                                   int sign, double threshold) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  const auto nodes = grid_nodes(domain, grid_n);
  std::vector<double> vals(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { vals[k] = s * dual.value(nodes[k]); });
  const auto peaks = grid_local_maxima(vals, grid_n + 1, domain.dim());

  std::vector<std::size_t> starts;
  for (auto k : peaks) {
    // Refinement can only raise the value; a generous cut keeps the number
    // of ascents small without missing near-threshold peaks.
    if (vals[k] >= threshold - 0.5 * std::abs(threshold) - 1e-12) starts.push_back(k);
  }
  std::vector<LocalMax> refined(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    refined[i] = maximize_locally(dual, domain, nodes[starts[i]], sign);
  });

  std::sort(refined.begin(), refined.end(), value_then_lex);
  std::vector<LocalMax> out;
  for (const auto& r : refined) {
    if (r.value < threshold) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const LocalMax& o) {
      return (o.x - r.x).norm() < 1e-7;
    });
    if (!dup) out.push_back(r);
  }
  return out;
}

LocalMax global_max_abs(const DualVariable& dual, const Domain& domain, int grid_n, int starts) {
  const auto nodes = grid_nodes(domain, grid_n);
  std::vector<double> vals(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { vals[k] = dual.value(nodes[k]); });
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  const auto n_starts = std::min<std::size_t>(static_cast<std::size_t>(starts), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_starts),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double va = std::abs(vals[a]);
                      const double vb = std::abs(vals[b]);
                      return va != vb ? va > vb : a < b;
                    });
  LocalMax best{nodes[order[0]], std::abs(vals[order[0]])};
  for (std::size_t i = 0; i < n_starts; ++i) {
    const std::size_t k = order[i];
    const int sign = vals[k] >= 0.0 ? 1 : -1;
    LocalMax r = maximize_locally(dual, domain, nodes[k], sign);
    r.value = std::abs(dual.value(r.x));
    if (r.value > best.value || (r.value == best.value && lex_less(r.x, best.x))) best = r;
  }
  return best;
}

FirstOrderReport check_first_order(const Problem& problem, const DiscreteMeasure& u, int grid_n,
                                   double tol) {
  if (grid_n < 16) throw Error("check_first_order requires grid_n >= 16");
  const DualVariable dual(problem, u);
  const double alpha = problem.alpha;
  FirstOrderReport rep;
  rep.tol = tol;

  LocalMax top = global_max_abs(dual, problem.domain, grid_n);
  // The support points are candidates too: the scan may land next to them.
  for (const auto& a : u.atoms()) {
    const double v = std::abs(dual.value(a.x));
    if (v > top.value) top = LocalMax{a.x, v};
  }
  rep.max_abs_p = top.value;
  rep.argmax = top.x;
  rep.sup_slack = top.value - alpha;
  rep.sup_bound = rep.sup_slack <= tol;

  double pairing = 0.0;
  for (const auto& a : u.atoms()) {
    const double p = dual.value(a.x);
    const double target = a.w > 0.0 ? alpha : -alpha;
    rep.atom_residuals.push_back(std::abs(p - target));
    rep.worst_atom_residual = std::max(rep.worst_atom_residual, rep.atom_residuals.back());
    pairing += a.w * p;
  }
  rep.atoms_on_level_set = rep.worst_atom_residual <= tol;
  rep.pairing_slack = alpha * tv_norm(u) - pairing;
  rep.pairing = rep.pairing_slack <= tol;
  rep.pass = rep.sup_bound && rep.atoms_on_level_set && rep.pairing;
  return rep;
}

namespace {

std::vector<Point> sphere_directions(int d) {
  std::vector<Point> dirs;
  if (d == 1) {
    dirs.push_back(Point::Constant(1, 1.0));
    dirs.push_back(Point::Constant(1, -1.0));
  } else if (d == 2) {
    for (int k = 0; k < 32; ++k) {
      const double a = 2.0 * M_PI * k / 32.0;
      Point v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
  } else {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int k = 0; k < 64; ++k) {
      Point v(d);
      for (int l = 0; l < d; ++l) v[l] = N(rng);
      dirs.push_back(v.normalized());
    }
    for (int l = 0; l < d; ++l) {
      dirs.push_back(Point::Unit(d, l));
      dirs.push_back(-Point::Unit(d, l));
    }
  }
  return dirs;
}

// alpha/2 <= s p(x) <= alpha - theta/4 |x - x_j|^2 on sampled points of the
// ball of radius r around every atom.
bool local_bound_holds(const DualVariable& dual, const std::vector<ActiveAtom>& atoms,
                       double alpha, double theta, double r, const std::vector<Point>& dirs) {
  constexpr int kRadial = 8;
  const double slack = 1e-12 * (1.0 + alpha);
  for (const auto& a : atoms) {
    for (int k = 1; k <= kRadial; ++k) {
      const double rho = r * k / kRadial;
      for (const auto& v : dirs) {
        const double sp = a.sign * dual.value(a.x + rho * v);
        if (sp < 0.5 * alpha - slack) return false;
        if (sp > alpha - 0.25 * theta * rho * rho + slack) return false;
      }
    }
  }
  return true;
}

}  // namespace

ActiveSets active_sets(const Problem& problem, const DiscreteMeasure& u, int grid_n,
                       double act_tol) {
  const DualVariable dual(problem, u);
  const double alpha = problem.alpha;
  const Domain& dom = problem.domain;
  ActiveSets sets;
  sets.act_tol = act_tol;
  sets.grid_n = grid_n;

  for (std::size_t j = 0; j < u.size(); ++j) {
    ActiveAtom a;
    a.index = j;
    a.x = u[j].x;
    a.lambda = u[j].w;
    a.p_value = dual.value(a.x);
    if (std::abs(a.p_value) < alpha - act_tol) {
      std::ostringstream msg;
      msg << "atom " << j << " at (" << a.x.transpose() << ") has |p| = " << std::abs(a.p_value)
          << " below alpha - act_tol = " << alpha - act_tol;
      throw InconsistentStationarity(msg.str());
    }
    a.sign = a.p_value >= 0.0 ? 1 : -1;
    sets.atoms.push_back(std::move(a));
  }

  // Curvature margin and separation radius.
  sets.local_theta = std::numeric_limits<double>::infinity();
  double r_max = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sets.atoms.size(); ++i) {
    const Matrix H = sets.atoms[i].sign * dual.hessian(sets.atoms[i].x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    sets.local_theta = std::min(sets.local_theta, -eig.eigenvalues().maxCoeff());
    r_max = std::min(r_max, dom.distance_to_boundary(sets.atoms[i].x));
    for (std::size_t j = i + 1; j < sets.atoms.size(); ++j) {
      r_max = std::min(r_max, 0.5 * (sets.atoms[i].x - sets.atoms[j].x).norm());
    }
  }
  if (sets.atoms.empty()) {
    sets.local_theta = 0.0;
    sets.r0 = 0.0;
  } else {
    const double theta = std::max(0.0, sets.local_theta);
    const auto dirs = sphere_directions(dom.dim());
    double r = r_max;
    sets.r0 = 0.0;
    for (int k = 0; k < 50 && r > 0.0; ++k, r *= 0.5) {
      if (local_bound_holds(dual, sets.atoms, alpha, theta, r, dirs)) {
        sets.r0 = r;
        break;
      }
    }
  }

  // Touching points away from the support.
  const double exclusion = std::max(sets.r0, 1e-6);
  auto near_support = [&](const Point& x) {
    return std::any_of(sets.atoms.begin(), sets.atoms.end(),
                       [&](const ActiveAtom& a) { return (a.x - x).norm() < exclusion; });
  };
  std::vector<LocalMax> plus_peaks = scan_extrema(dual, dom, grid_n, +1, 0.5 * alpha);
  std::vector<LocalMax> minus_peaks = scan_extrema(dual, dom, grid_n, -1, 0.5 * alpha);
  for (const auto& pk : plus_peaks) {
    if (pk.value >= alpha - act_tol && !near_support(pk.x)) sets.i_plus.push_back(pk);
  }
  for (const auto& pk : minus_peaks) {
    if (pk.value >= alpha - act_tol && !near_support(pk.x)) sets.i_minus.push_back(pk);
  }

  // Complementarity margin outside the balls around A and around I+-.
  const double touch_radius = sets.atoms.empty() ? 0.05 * dom.diameter() : exclusion;
  auto excluded = [&](const Point& x) {
    if (std::any_of(sets.atoms.begin(), sets.atoms.end(),
                    [&](const ActiveAtom& a) { return (a.x - x).norm() < exclusion; })) {
      return true;
    }
    auto near = [&](const LocalMax& m) { return (m.x - x).norm() < touch_radius; };
    return std::any_of(sets.i_plus.begin(), sets.i_plus.end(), near) ||
           std::any_of(sets.i_minus.begin(), sets.i_minus.end(), near);
  };
  const auto nodes = grid_nodes(dom, grid_n);
  std::vector<double> far(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t k) {
    far[k] = excluded(nodes[k]) ? 0.0 : std::abs(dual.value(nodes[k]));
  });
  double max_far = far.empty() ? 0.0 : *std::max_element(far.begin(), far.end());
  for (const auto* peaks : {&plus_peaks, &minus_peaks}) {
    for (const auto& pk : *peaks) {
      if (!excluded(pk.x)) max_far = std::max(max_far, pk.value);
    }
  }
  // The sup outside the balls is often attained on their boundary, which the
  // grid only resolves to O(1/grid_n); sample the spheres directly.
  const auto sphere = sphere_directions(dom.dim());
  auto probe_sphere = [&](const Point& center, double radius) {
    for (const auto& v : sphere) {
      const Point y = center + radius * v;
      if (dom.contains(y) && !excluded(y)) max_far = std::max(max_far, std::abs(dual.value(y)));
    }
  };
  for (const auto& a : sets.atoms) probe_sphere(a.x, exclusion);
  for (const auto* touch : {&sets.i_plus, &sets.i_minus}) {
    for (const auto& m : *touch) probe_sphere(m.x, touch_radius);
  }
  sets.sigma = alpha - max_far;
  return sets;
}

}  // namespace radon

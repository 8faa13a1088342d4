#include "radon/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radon/errors.hpp"
#include "radon/lp.hpp"

namespace radon {

namespace {

// Partial transport between two nonnegative atom lists:
//   maximize sum (profit - c_ij) gamma_ij   s.t. row sums <= a, col sums <= b.
// Pairs with c_ij >= profit never carry mass and are left out of the LP.
Eigen::MatrixXd partial_transport(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                                  const Eigen::MatrixXd& cost, double profit) {
  const auto ns = static_cast<Eigen::Index>(src.size());
  const auto nt = static_cast<Eigen::Index>(dst.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> vars;
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) {
      if (cost(i, j) < profit) vars.emplace_back(i, j);
    }
  }
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(ns, nt);
  if (vars.empty()) return gamma;

  const auto nv = static_cast<Eigen::Index>(vars.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns + nt, nv);
  Eigen::VectorXd b(ns + nt);
  Eigen::VectorXd c(nv);
  for (Eigen::Index i = 0; i < ns; ++i) b[i] = src[i].w;
  for (Eigen::Index j = 0; j < nt; ++j) b[ns + j] = dst[j].w;
  for (Eigen::Index v = 0; v < nv; ++v) {
    const auto [i, j] = vars[v];
    A(i, v) = 1.0;
    A(ns + j, v) = 1.0;
    c[v] = profit - cost(i, j);
  }
  const lp::Solution sol = lp::maximize(A, b, c);
  if (sol.status != lp::Status::kOptimal) throw Error("transport LP did not reach optimality");
  for (Eigen::Index v = 0; v < nv; ++v) {
    gamma(vars[v].first, vars[v].second) = std::max(0.0, sol.x[v]);
  }
  return gamma;
}

Eigen::MatrixXd distance_matrix(const std::vector<Atom>& src, const std::vector<Atom>& dst) {
  Eigen::MatrixXd cost(src.size(), dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < dst.size(); ++j) cost(i, j) = (src[i].x - dst[j].x).norm();
  }
  return cost;
}

}  // namespace

std::pair<double, TransportPlan> w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double mass_tol) {
  if (!mu.nonnegative() || !nu.nonnegative()) {
    throw SignError("w1 requires nonnegative measures");
  }
  const double mass_mu = mu.total_mass();
  const double mass_nu = nu.total_mass();
  if (std::abs(mass_mu - mass_nu) > mass_tol) {
    std::ostringstream msg;
    msg << "w1 requires equal masses, got " << mass_mu << " and " << mass_nu;
    throw MassError(msg.str());
  }
  TransportPlan plan;
  plan.rows = mu.atoms();
  plan.cols = nu.atoms();
  const Eigen::MatrixXd cost = distance_matrix(plan.rows, plan.cols);
  // Any profit above the largest cost makes every unit worth moving, so the
  // optimum ships the full common mass at minimal cost.
  const double profit = (cost.size() > 0 ? cost.maxCoeff() : 0.0) + 1.0;
  plan.gamma = partial_transport(plan.rows, plan.cols, cost, profit);
  plan.cost = (plan.gamma.array() * cost.array()).sum();
  return {plan.cost, std::move(plan)};
}

FlatNormResult bl_norm_with_plan(const DiscreteMeasure& u) {
  const auto [plus, minus] = jordan_decompose(u);
  FlatNormResult res;
  res.plan.rows = plus.atoms();
  res.plan.cols = minus.atoms();
  const Eigen::MatrixXd dist = distance_matrix(res.plan.rows, res.plan.cols);
  const Eigen::MatrixXd cost = dist.cwiseMin(2.0);
  res.plan.gamma = partial_transport(res.plan.rows, res.plan.cols, cost, 2.0);
  res.plan.cost = (res.plan.gamma.array() * cost.array()).sum();
  // Unmatched mass is paid row/column-wise, which avoids the cancellation in
  // (mass+ + mass-) - 2 * shipped.
  for (std::size_t i = 0; i < res.plan.rows.size(); ++i) {
    res.destroyed_plus +=
        std::max(0.0, res.plan.rows[i].w - res.plan.gamma.row(static_cast<Eigen::Index>(i)).sum());
  }
  for (std::size_t j = 0; j < res.plan.cols.size(); ++j) {
    res.destroyed_minus +=
        std::max(0.0, res.plan.cols[j].w - res.plan.gamma.col(static_cast<Eigen::Index>(j)).sum());
  }
  res.value = res.plan.cost + res.destroyed_plus + res.destroyed_minus;
  return res;
}

double bl_norm(const DiscreteMeasure& u) { return bl_norm_with_plan(u).value; }

double bl_dual_oracle(const DiscreteMeasure& u, int grid_n) {
  if (u.dim() > 2) throw UnsupportedDimension("bl_dual_oracle supports d <= 2 only");
  if (grid_n < 2) throw Error("bl_dual_oracle requires grid_n >= 2");
  const auto& atoms = u.atoms();
  const auto n = static_cast<Eigen::Index>(atoms.size());
  if (n == 0) return 0.0;

  // Variables psi = phi + 1 in [0, 2].
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && (atoms[i].x - atoms[j].x).norm() < 2.0) pairs.emplace_back(i, j);
    }
  }
  const auto rows = n + static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd b(rows);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = 1.0;
    b[i] = 2.0;
    c[i] = atoms[i].w;
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const auto r = n + static_cast<Eigen::Index>(k);
    A(r, i) = 1.0;
    A(r, j) = -1.0;
    b[r] = (atoms[i].x - atoms[j].x).norm();
  }
  const lp::Solution sol = lp::maximize(A, b, c);
  if (sol.status != lp::Status::kOptimal) throw Error("dual oracle LP did not reach optimality");
  const Eigen::VectorXd phi = sol.x.array() - 1.0;

  // McShane extension, clipped to [-1, 1]; admissible by construction, checked
  // on the grid so the returned value is a certified lower bound.
  auto extension = [&](const Point& x) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) v = std::min(v, phi[i] + (x - atoms[i].x).norm());
    return std::max(-1.0, v);
  };

  const int d = u.dim();
  Point lo = atoms[0].x, hi = atoms[0].x;
  for (const auto& a : atoms) {
    lo = lo.cwiseMin(a.x);
    hi = hi.cwiseMax(a.x);
  }
  lo.array() -= 0.5;
  hi.array() += 0.5;
  const int per_axis = grid_n + 1;
  const int total = d == 1 ? per_axis : per_axis * per_axis;
  std::vector<Point> nodes;
  std::vector<double> values;
  nodes.reserve(total);
  for (int k = 0; k < total; ++k) {
    Point x(d);
    int rem = k;
    for (int l = 0; l < d; ++l) {
      const int idx = rem % per_axis;
      rem /= per_axis;
      x[l] = lo[l] + (hi[l] - lo[l]) * idx / grid_n;
    }
    nodes.push_back(x);
    values.push_back(extension(x));
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (std::abs(values[k]) > 1.0 + 1e-12) throw Error("dual oracle: extension exceeds sup bound");
    for (std::size_t q = k + 1; q < nodes.size(); ++q) {
      const double dist = (nodes[k] - nodes[q]).norm();
      if (std::abs(values[k] - values[q]) > dist + 1e-12) {
        throw Error("dual oracle: extension violates the Lipschitz bound");
      }
    }
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) value += atoms[i].w * extension(atoms[i].x);
  return value;
}

W1BlIdentityReport check_w1_bl_identity(const DiscreteMeasure& u, const Domain& domain,
                                        double tol) {
  if (std::abs(u.total_mass()) > kDefaultMassTol) {
    throw MassError("BL/W1 identity requires a measure with zero total mass");
  }
  if (domain.diameter() > 2.0) {
    throw DomainError("BL/W1 identity requires diam(domain) <= 2");
  }
  const auto [plus, minus] = jordan_decompose(u);
  W1BlIdentityReport rep;
  rep.bl = bl_norm(u);
  rep.w1 = w1(plus, minus).first;
  rep.difference = std::abs(rep.bl - rep.w1);
  rep.equal = rep.difference <= tol;
  return rep;
}

}  // namespace radon

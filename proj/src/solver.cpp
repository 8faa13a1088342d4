#include "radon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "radon/errors.hpp"

namespace radon {

namespace {

Matrix columns(const Problem& problem, const std::vector<Point>& positions) {
  Matrix K(problem.kernel.output_dim(), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t j = 0; j < positions.size(); ++j) {
    K.col(static_cast<Eigen::Index>(j)) = problem.kernel.eval(positions[j]);
  }
  return K;
}

double weight_objective(const Problem& problem, const Matrix& K, const Vector& w) {
  return problem.loss.value(K * w) + problem.alpha * w.lpNorm<1>();
}

Vector soft_threshold(const Vector& v, double tau) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(v[i]) - tau, 0.0), v[i]);
  }
  return out;
}

// Newton iterations on the smooth problem restricted to the nonzero entries
// of w with their signs frozen. Returns w unchanged unless it improves J and
// keeps the signs.
Vector newton_polish(const Problem& problem, const Matrix& K, Vector w) {
  std::vector<Eigen::Index> S;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) S.push_back(i);
  }
  if (S.empty()) return w;
  const auto n = static_cast<Eigen::Index>(S.size());
  Matrix KS(K.rows(), n);
  Vector s(n), x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    KS.col(i) = K.col(S[static_cast<std::size_t>(i)]);
    x[i] = w[S[static_cast<std::size_t>(i)]];
    s[i] = x[i] > 0.0 ? 1.0 : -1.0;
  }
  double best = weight_objective(problem, K, w);
  for (int it = 0; it < 20; ++it) {
    const Vector y = KS * x;
    const Vector grad = KS.transpose() * problem.loss.gradient(y) + problem.alpha * s;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15) break;
    const Matrix H = KS.transpose() * problem.loss.hessian(y) * KS;
    Eigen::LDLT<Matrix> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Vector x_new = x - ldlt.solve(grad);
    if (!x_new.allFinite() || (x_new.cwiseProduct(s).array() <= 0.0).any()) break;
    Vector w_new = w;
    for (Eigen::Index i = 0; i < n; ++i) w_new[S[static_cast<std::size_t>(i)]] = x_new[i];
    const double val = weight_objective(problem, K, w_new);
    if (!(val <= best)) break;
    best = val;
    w = w_new;
    x = x_new;
  }
  return w;
}

}  // namespace

Vector solve_weights(const Problem& problem, const std::vector<Point>& positions,
                     const Vector& start, double tol, int max_iters) {
  const Matrix K = columns(problem, positions);
  if (K.cols() == 0) return Vector();
  const double knorm = Eigen::JacobiSVD<Matrix>(K).singularValues()[0];
  const double lip = std::max(problem.loss.curvature_bound() * knorm * knorm, 1e-300);
  const double step = 1.0 / lip;
  const double tau = problem.alpha * step;

  Vector w = start;
  Vector z = w;
  double t = 1.0;
  double f = weight_objective(problem, K, w);
  for (int it = 0; it < max_iters; ++it) {
    const Vector g = K.transpose() * problem.loss.gradient(K * z);
    const Vector w_new = soft_threshold(z - step * g, tau);
    const double f_new = weight_objective(problem, K, w_new);
    if (f_new > f) {
      // Adaptive restart: drop the momentum and take a plain proximal step.
      z = w;
      t = 1.0;
      const Vector gw = K.transpose() * problem.loss.gradient(K * w);
      const Vector w_plain = soft_threshold(w - step * gw, tau);
      const double f_plain = weight_objective(problem, K, w_plain);
      const double change = (w_plain - w).norm() * lip;
      if (f_plain <= f) {
        w = w_plain;
        f = f_plain;
        z = w;
      }
      if (change <= tol) break;
      continue;
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double change = (w_new - w).norm() * lip;
    z = w_new + ((t - 1.0) / t_new) * (w_new - w);
    w = w_new;
    f = f_new;
    t = t_new;
    if (change <= tol) break;
  }
  return newton_polish(problem, K, w);
}

namespace {

struct Packed {
  Vector lambda;
  std::vector<Point> x;
};

double smooth_objective(const Problem& problem, const Packed& z, const Vector& signs) {
  Vector y = Vector::Zero(problem.kernel.output_dim());
  for (std::size_t j = 0; j < z.x.size(); ++j) {
    y.noalias() += z.lambda[static_cast<Eigen::Index>(j)] * problem.kernel.eval(z.x[j]);
  }
  return problem.loss.value(y) + problem.alpha * signs.dot(z.lambda);
}

}  // namespace

DiscreteMeasure refine_positions(const Problem& problem, const DiscreteMeasure& u,
                                 const RefineOptions& options) {
  if (u.empty()) return u;
  const auto& kernel = problem.kernel;
  const int d = problem.domain.dim();
  const auto N = static_cast<Eigen::Index>(u.size());
  const Eigen::Index n = N * (1 + d);

  Packed z;
  z.lambda.resize(N);
  Vector signs(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    z.lambda[j] = u[static_cast<std::size_t>(j)].w;
    z.x.push_back(u[static_cast<std::size_t>(j)].x);
    signs[j] = z.lambda[j] > 0.0 ? 1.0 : -1.0;
  }
  double f = smooth_objective(problem, z, signs);
  double mu = 1e-6;

  for (int it = 0; it < options.max_iters; ++it) {
    // Jacobian of Ku with respect to (lambda, x).
    Matrix Jz(kernel.output_dim(), n);
    Vector y = Vector::Zero(kernel.output_dim());
    for (Eigen::Index j = 0; j < N; ++j) {
      const Point& x = z.x[static_cast<std::size_t>(j)];
      const Vector kx = kernel.eval(x);
      y.noalias() += z.lambda[j] * kx;
      Jz.col(j) = kx;
      Jz.middleCols(N + j * d, d) = z.lambda[j] * kernel.jacobian(x);
    }
    const Vector g = problem.loss.gradient(y);
    Vector grad = Jz.transpose() * g;
    grad.head(N) += problem.alpha * signs;
    // Positions pinned on the boundary do not count against convergence
    // when the gradient pushes them outward.
    Vector free_grad = grad;
    for (Eigen::Index j = 0; j < N; ++j) {
      const Point& x = z.x[static_cast<std::size_t>(j)];
      for (int l = 0; l < d; ++l) {
        const double gl = grad[N + j * d + l];
        if ((x[l] <= problem.domain.lower()[l] && gl > 0.0) ||
            (x[l] >= problem.domain.upper()[l] && gl < 0.0)) {
          free_grad[N + j * d + l] = 0.0;
        }
      }
    }
    if (free_grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) break;

    Matrix H = Jz.transpose() * problem.loss.hessian(y) * Jz;
    for (Eigen::Index j = 0; j < N; ++j) {
      const Point& x = z.x[static_cast<std::size_t>(j)];
      const Vector cross = kernel.jacobian(x).transpose() * g;
      H.block(j, N + j * d, 1, d) += cross.transpose();
      H.block(N + j * d, j, d, 1) += cross;
      H.block(N + j * d, N + j * d, d, d) += z.lambda[j] * kernel.weighted_hessian(x, g);
    }

    bool accepted = false;
    while (mu < 1e12) {
      Matrix A = H;
      A.diagonal().array() += mu * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      Eigen::LLT<Matrix> llt(A);
      if (llt.info() != Eigen::Success) {
        mu *= 10.0;
        continue;
      }
      const Vector step = -llt.solve(grad);
      Packed trial = z;
      for (Eigen::Index j = 0; j < N; ++j) {
        double lam = z.lambda[j] + step[j];
        if (lam * signs[j] < 0.0) lam = 0.0;
        trial.lambda[j] = lam;
        trial.x[static_cast<std::size_t>(j)] =
            problem.domain.project(z.x[static_cast<std::size_t>(j)] + step.segment(N + j * d, d));
      }
      const double f_trial = smooth_objective(problem, trial, signs);
      if (f_trial <= f) {
        const bool stalled = f - f_trial <= 1e-16 * (1.0 + std::abs(f));
        z = std::move(trial);
        f = f_trial;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = !stalled;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }

  std::vector<Atom> atoms;
  for (Eigen::Index j = 0; j < N; ++j) {
    atoms.push_back(Atom{z.x[static_cast<std::size_t>(j)], z.lambda[j]});
  }
  DiscreteMeasure out = DiscreteMeasure::canonicalize(atoms, problem.domain);
  // Merging may (in principle) cost objective; keep the input then.
  if (objective(problem, out) > objective(problem, u)) return u;
  return out;
}

SolveResult solve_gcg(const Problem& problem, const SolverConfig& config) {
  SolveResult res;
  DiscreteMeasure u(problem.domain.dim());
  double j_prev = objective(problem, u);
  bool converged = false;
  double residual = 0.0;
  int it = 0;
  for (; it <= config.max_iters; ++it) {
    const DualVariable dual(problem, u);
    LocalMax top = global_max_abs(dual, problem.domain, config.grid_n);
    for (const auto& a : u.atoms()) {
      const double v = std::abs(dual.value(a.x));
      if (v > top.value) top = LocalMax{a.x, v};
    }
    const double j_now = objective(problem, u);
    res.log.push_back(IterationRecord{it, j_now, top.value, u.size()});
    residual = top.value - problem.alpha;
    if (top.value <= problem.alpha + config.ins_tol) {
      converged = true;
      break;
    }
    if (it == config.max_iters) break;

    std::vector<Point> positions;
    Vector start(static_cast<Eigen::Index>(u.size() + 1));
    for (std::size_t j = 0; j < u.size(); ++j) {
      positions.push_back(u[j].x);
      start[static_cast<Eigen::Index>(j)] = u[j].w;
    }
    positions.push_back(top.x);
    start[static_cast<Eigen::Index>(u.size())] = 0.0;
    const Vector w =
        solve_weights(problem, positions, start, config.weight_tol, config.max_weight_iters);
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      const double wj = w[static_cast<Eigen::Index>(j)];
      if (std::abs(wj) > config.prune_tol) atoms.push_back(Atom{positions[j], wj});
    }
    u = DiscreteMeasure::canonicalize(atoms, problem.domain);
    if (config.refine) u = refine_positions(problem, u);

    const double j_new = objective(problem, u);
    if (j_new > j_prev + 1e-12 * (1.0 + std::abs(j_prev))) {
      std::ostringstream msg;
      msg << "objective increased in iteration " << it << ": " << j_prev << " -> " << j_new;
      throw NonConvergence(msg.str(), it, residual);
    }
    j_prev = std::min(j_prev, j_new);
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "GCG did not reach max |p| <= alpha + " << config.ins_tol << " within "
        << config.max_iters << " iterations (max |p| - alpha = " << residual << ")";
    throw NonConvergence(msg.str(), it, residual);
  }
  res.u = u;
  res.first_order = check_first_order(problem, u, std::max(config.grid_n, 16), 10.0 * config.ins_tol);
  if (!res.first_order.pass) {
    std::ostringstream msg;
    msg << "GCG output fails the first-order check (sup slack " << res.first_order.sup_slack
        << ", atom residual " << res.first_order.worst_atom_residual << ", pairing slack "
        << res.first_order.pairing_slack << ")";
    throw NonConvergence(msg.str(), it, residual);
  }
  return res;
}

void write_iterations_csv(std::ostream& os, const std::vector<IterationRecord>& log) {
  os << "iteration,objective,max_abs_p,atoms\n";
  os.precision(17);
  for (const auto& r : log) {
    os << r.iteration << ',' << r.objective << ',' << r.max_abs_p << ',' << r.atoms << '\n';
  }
}

}  // namespace radon

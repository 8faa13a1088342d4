#include "radon/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "radon/errors.hpp"

namespace radon {

Direction Direction::zero(std::size_t n_atoms, int dim) {
  Direction d;
  d.c = Vector::Zero(static_cast<Eigen::Index>(n_atoms));
  d.V.assign(n_atoms, Point::Zero(dim));
  return d;
}

HessianCertificate hessian_certificate(const DualVariable& dual, const ActiveSets& sets,
                                       const Domain& domain, double theta_tol,
                                       double boundary_tol) {
  HessianCertificate cert;
  cert.theta = kInfinity;
  for (const auto& a : sets.atoms) {
    if (domain.distance_to_boundary(a.x) <= boundary_tol) {
      std::ostringstream msg;
      msg << "atom " << a.index << " at (" << a.x.transpose()
          << ") is on the boundary; curvature certificates need interior atoms";
      throw BoundaryAtomError(msg.str());
    }
    Matrix H = dual.hessian(a.x);
    const Matrix SH = a.sign * H;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (SH + SH.transpose()));
    cert.theta = std::min(cert.theta, -eig.eigenvalues().maxCoeff());
    cert.hessians.push_back(std::move(H));
  }
  cert.pass = cert.theta > theta_tol;
  return cert;
}

namespace {

void check_shape(const ActiveSets& sets, const Direction& dir, int d) {
  const auto n = sets.atoms.size();
  if (static_cast<std::size_t>(dir.c.size()) != n || dir.V.size() != n) {
    throw Error("direction does not match the number of support atoms");
  }
  for (const auto& v : dir.V) {
    if (v.size() != d) throw Error("position direction has the wrong dimension");
  }
}

void check_cone(const Direction& dir) {
  for (const auto* list : {&dir.mu_plus, &dir.mu_minus}) {
    for (const auto& a : *list) {
      if (a.w < 0.0) throw ConeViolation("touching-set masses must be nonnegative");
    }
  }
}

}  // namespace

Vector lifted_image(const Problem& problem, const ActiveSets& sets, const Direction& dir) {
  const auto& k = problem.kernel;
  Vector y = Vector::Zero(k.output_dim());
  for (std::size_t j = 0; j < sets.atoms.size(); ++j) {
    const Point& x = sets.atoms[j].x;
    y.noalias() += dir.c[static_cast<Eigen::Index>(j)] * k.eval(x);
    y.noalias() += k.jacobian(x) * dir.V[j];
  }
  for (const auto& a : dir.mu_plus) y.noalias() += a.w * k.eval(a.x);
  for (const auto& a : dir.mu_minus) y.noalias() -= a.w * k.eval(a.x);
  return y;
}

double soc_form(const Problem& problem, const DiscreteMeasure& u, const ActiveSets& sets,
                const Direction& d1, const Direction& d2) {
  const int d = problem.domain.dim();
  check_shape(sets, d1, d);
  check_shape(sets, d2, d);
  check_cone(d1);
  check_cone(d2);
  const DualVariable dual(problem, u);
  const Matrix HL = problem.loss.hessian(apply_K(problem, u));
  double value = lifted_image(problem, sets, d1).dot(HL * lifted_image(problem, sets, d2));
  for (std::size_t j = 0; j < sets.atoms.size(); ++j) {
    const Matrix H = dual.hessian(sets.atoms[j].x);
    value -= d1.V[j].dot(H * d2.V[j]) / sets.atoms[j].lambda;
  }
  return value;
}

namespace {

struct FormBasis {
  Matrix images;       // m x n: lifted image of every basis direction
  Matrix curvature;    // n x n: the -(1/lambda) Hess p blocks
  Eigen::Index n_free = 0;  // leading coordinates without sign constraint
};

FormBasis assemble_basis(const Problem& problem, const DiscreteMeasure& u, const ActiveSets& sets,
                         bool include_positions, bool include_touching) {
  const auto& k = problem.kernel;
  const int d = problem.domain.dim();
  const auto N = static_cast<Eigen::Index>(sets.atoms.size());
  const Eigen::Index nv = include_positions ? d * N : 0;
  const Eigen::Index np =
      include_touching ? static_cast<Eigen::Index>(sets.i_plus.size() + sets.i_minus.size()) : 0;
  const Eigen::Index n = N + nv + np;
  FormBasis basis;
  basis.images = Matrix::Zero(k.output_dim(), n);
  basis.curvature = Matrix::Zero(n, n);
  basis.n_free = N + nv;
  const DualVariable dual(problem, u);
  for (Eigen::Index j = 0; j < N; ++j) {
    const Point& x = sets.atoms[j].x;
    basis.images.col(j) = k.eval(x);
    if (include_positions) {
      basis.images.middleCols(N + j * d, d) = k.jacobian(x);
      basis.curvature.block(N + j * d, N + j * d, d, d) =
          -dual.hessian(x) / sets.atoms[j].lambda;
    }
  }
  if (include_touching) {
    Eigen::Index col = N + nv;
    for (const auto& z : sets.i_plus) basis.images.col(col++) = k.eval(z.x);
    for (const auto& z : sets.i_minus) basis.images.col(col++) = -k.eval(z.x);
  }
  return basis;
}

Vector project_cone(Vector z, Eigen::Index n_free) {
  for (Eigen::Index i = n_free; i < z.size(); ++i) z[i] = std::max(0.0, z[i]);
  return z;
}

// Maximizes z^T B z over {|z| = 1, z_i >= 0 for i >= n_free} for positive
// definite B by z <- P(Bz) / |P(Bz)|, which increases the objective
// monotonically since z^T B z is convex.
Vector projected_power(const Matrix& B, Vector z, Eigen::Index n_free, double tol,
                       int max_iterations) {
  z = project_cone(z, n_free);
  if (z.norm() == 0.0) return z;
  z.normalize();
  for (int it = 0; it < max_iterations; ++it) {
    Vector next = project_cone(B * z, n_free);
    const double nn = next.norm();
    if (nn == 0.0) break;
    next /= nn;
    const double change = (next - z).norm();
    z = std::move(next);
    if (change < tol) break;
  }
  return z;
}

}  // namespace

SocSpectrum soc_min_eig(const Problem& problem, const DiscreteMeasure& u, const ActiveSets& sets,
                        const SocOptions& options) {
  const FormBasis basis =
      assemble_basis(problem, u, sets, options.include_positions, options.include_touching);
  const Matrix HL = problem.loss.hessian(apply_K(problem, u));
  Matrix M = basis.images.transpose() * HL * basis.images + basis.curvature;
  M = 0.5 * (M + M.transpose());

  SocSpectrum out;
  out.form = M;
  const Eigen::Index n = M.rows();
  out.sample_relative = options.include_touching && !sets.strict_complementarity();
  if (n == 0) {
    out.min_value = kInfinity;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  if (basis.n_free == n) {
    out.exact = true;
    out.min_value = eig.eigenvalues()[0];
    out.minimizer = eig.eigenvectors().col(0);
    return out;
  }

  out.exact = false;
  const double shift = eig.eigenvalues().cwiseAbs().maxCoeff() + 1.0;
  const Matrix B = shift * Matrix::Identity(n, n) - M;
  std::vector<Vector> starts;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, 4); ++k) {
    starts.push_back(eig.eigenvectors().col(k));
    starts.push_back(-eig.eigenvectors().col(k));
  }
  for (Eigen::Index i = basis.n_free; i < n; ++i) starts.push_back(Vector::Unit(n, i));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  for (int s = 0; s < 8; ++s) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = N01(rng);
    starts.push_back(z);
  }
  out.min_value = kInfinity;
  for (const auto& s : starts) {
    const Vector z = projected_power(B, s, basis.n_free, options.tol, options.max_iterations);
    if (z.norm() == 0.0) continue;
    const double v = z.dot(M * z);
    if (v < out.min_value) {
      out.min_value = v;
      out.minimizer = z;
    }
  }
  return out;
}

SecondOrderReport check_C_conditions(const Problem& problem, const DiscreteMeasure& u,
                                     const ActiveSets& sets, const SecondOrderOptions& options) {
  const DualVariable dual(problem, u);
  SecondOrderReport rep;
  const HessianCertificate cert = hessian_certificate(dual, sets, problem.domain,
                                                      options.theta_tol, options.boundary_tol);
  rep.theta = cert.theta;
  rep.hessians = cert.hessians;
  rep.convex_loss = problem.loss.convex();
  rep.strongly_convex_loss = problem.loss.strongly_convex();
  rep.strict_complementarity = sets.strict_complementarity();

  SocOptions full = options.soc;
  full.include_positions = true;
  full.include_touching = true;
  const SocSpectrum soc = soc_min_eig(problem, u, sets, full);
  rep.soc_min_eig = soc.min_value;
  rep.sample_relative = soc.sample_relative;

  SocOptions weights = options.soc;
  weights.include_positions = false;
  weights.include_touching = true;
  rep.weight_block_min = soc_min_eig(problem, u, sets, weights).min_value;

  const auto N = static_cast<Eigen::Index>(sets.atoms.size());
  const Matrix HL = problem.loss.hessian(apply_K(problem, u));
  Matrix Kmat(problem.kernel.output_dim(), N);
  for (Eigen::Index j = 0; j < N; ++j) Kmat.col(j) = problem.kernel.eval(sets.atoms[j].x);
  if (N > 0) {
    const Matrix G = Kmat.transpose() * HL * Kmat;
    rep.gram_eigenvalues = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (G + G.transpose()))
                               .eigenvalues();
    rep.gram_min_eig = rep.gram_eigenvalues[0];
    Eigen::JacobiSVD<Matrix> svd(Kmat);
    rep.kernel_singular_values = Vector::Zero(N);
    rep.kernel_singular_values.head(svd.singularValues().size()) = svd.singularValues();
  } else {
    rep.gram_min_eig = kInfinity;
  }

  const bool curvature = cert.theta > options.theta_tol;
  rep.b1 = curvature && rep.soc_min_eig > options.soc_tol;
  rep.c1 = curvature && rep.weight_block_min > options.soc_tol;
  rep.c3 = curvature && rep.gram_min_eig > options.soc_tol;
  bool full_rank = true;
  if (N > 0) {
    const double smax = rep.kernel_singular_values.maxCoeff();
    full_rank = rep.kernel_singular_values.minCoeff() > options.rank_tol * std::max(smax, 1e-300);
  }
  rep.c4 = curvature && full_rank;
  return rep;
}

double second_subderivative(const Problem& problem, const DiscreteMeasure& u,
                            const ActiveSets& sets, const Direction& dir, double match_tol) {
  check_shape(sets, dir, problem.domain.dim());
  auto on_support = [&](const Point& x) {
    return std::any_of(sets.atoms.begin(), sets.atoms.end(),
                       [&](const ActiveAtom& a) { return (a.x - x).norm() <= match_tol; });
  };
  auto on_set = [&](const Point& x, const std::vector<LocalMax>& touching) {
    return std::any_of(touching.begin(), touching.end(),
                       [&](const LocalMax& z) { return (z.x - x).norm() <= match_tol; });
  };
  for (const auto& a : dir.mu_plus) {
    if (a.w < 0.0) return kInfinity;
    if (a.w > 0.0 && !on_set(a.x, sets.i_plus) && !on_support(a.x)) return kInfinity;
  }
  for (const auto& a : dir.mu_minus) {
    if (a.w < 0.0) return kInfinity;
    if (a.w > 0.0 && !on_set(a.x, sets.i_minus) && !on_support(a.x)) return kInfinity;
  }
  const DualVariable dual(problem, u);
  double value = 0.0;
  for (std::size_t j = 0; j < sets.atoms.size(); ++j) {
    if (dir.V[j].squaredNorm() == 0.0) continue;
    value -= dir.V[j].dot(dual.hessian(sets.atoms[j].x) * dir.V[j]) / sets.atoms[j].lambda;
  }
  return value;
}

namespace {

// Atoms of the recovery sequence for one support atom (without u itself).
std::vector<Atom> recovery_atoms(const Atom& atom, const Point& V, double c, double t,
                                 const Domain& domain) {
  const double scaled = atom.w + t * c;
  if (scaled == 0.0 || (scaled > 0.0) != (atom.w > 0.0)) {
    throw Error("recovery_quotient: t too large, lambda_j + t c changes sign");
  }
  const Point shifted = atom.x + (t / scaled) * V;
  if (!domain.contains(shifted)) {
    throw DomainError("recovery_quotient: shifted atom leaves the domain");
  }
  return {Atom{atom.x, c - scaled / t}, Atom{shifted, scaled / t}};
}

double quotient_from(const Problem& problem, const DiscreteMeasure& u,
                     const std::vector<Atom>& mu, double t) {
  const DualVariable dual(problem, u);
  std::vector<Atom> perturbed = u.atoms();
  double pairing = 0.0;
  for (const auto& a : mu) {
    perturbed.push_back(Atom{a.x, t * a.w});
    pairing += a.w * dual.value(a.x);
  }
  const DiscreteMeasure v = DiscreteMeasure::canonicalize(perturbed, u.dim());
  const double g_diff = problem.alpha * (tv_norm(v) - tv_norm(u));
  return (g_diff - t * pairing) / (0.5 * t * t);
}

}  // namespace

double recovery_quotient(const Problem& problem, const DiscreteMeasure& u, std::size_t j,
                         const Point& V, double c, double t) {
  if (j >= u.size()) throw Error("recovery_quotient: atom index out of range");
  if (!(t > 0.0)) throw Error("recovery_quotient: t must be positive");
  return quotient_from(problem, u, recovery_atoms(u[j], V, c, t, problem.domain), t);
}

double recovery_quotient(const Problem& problem, const DiscreteMeasure& u,
                         const ActiveSets& sets, const Direction& dir, double t) {
  check_shape(sets, dir, problem.domain.dim());
  check_cone(dir);
  if (!(t > 0.0)) throw Error("recovery_quotient: t must be positive");
  std::vector<Atom> mu;
  for (std::size_t j = 0; j < sets.atoms.size(); ++j) {
    const Atom atom{sets.atoms[j].x, sets.atoms[j].lambda};
    const auto part =
        recovery_atoms(atom, dir.V[j], dir.c[static_cast<Eigen::Index>(j)], t, problem.domain);
    mu.insert(mu.end(), part.begin(), part.end());
  }
  for (const auto& a : dir.mu_plus) mu.push_back(a);
  for (const auto& a : dir.mu_minus) mu.push_back(Atom{a.x, -a.w});
  return quotient_from(problem, u, mu, t);
}

double ndc_probe(const Problem& problem, const DiscreteMeasure& u, std::size_t j, const Point& v,
                 double t) {
  if (j >= u.size()) throw Error("ndc_probe: atom index out of range");
  if (!(t > 0.0)) throw Error("ndc_probe: t must be positive");
  const Atom& atom = u[j];
  const Point step = (t / atom.w) * v;
  const Point left = atom.x - step;
  const Point right = atom.x + step;
  if (!problem.domain.contains(left) || !problem.domain.contains(right)) {
    throw DomainError("ndc_probe: shifted atoms leave the domain");
  }
  const double half = atom.w / (2.0 * t);
  const std::vector<Atom> mu = {Atom{left, half}, Atom{atom.x, -2.0 * half}, Atom{right, half}};

  const DualVariable dual(problem, u);
  std::vector<Atom> perturbed = u.atoms();
  double pairing = 0.0;
  for (const auto& a : mu) {
    perturbed.push_back(Atom{a.x, t * a.w});
    pairing += a.w * dual.value(a.x);
  }
  const DiscreteMeasure moved = DiscreteMeasure::canonicalize(perturbed, u.dim());
  const double g_term = problem.alpha * (tv_norm(moved) - tv_norm(u)) / (t * t);
  return g_term - pairing / t;
}

double ndc_limit(const Problem& problem, const DiscreteMeasure& u, std::size_t j,
                 const Point& v) {
  const DualVariable dual(problem, u);
  const Atom& atom = u[j];
  const double s = dual.value(atom.x) >= 0.0 ? 1.0 : -1.0;
  return -s * v.dot(dual.hessian(atom.x) * v) / (2.0 * std::abs(atom.w));
}

}  // namespace radon

#pragma once

#include <iosfwd>
#include <vector>

#include "radon/optimality.hpp"

namespace radon {

struct SolverConfig {
  int max_iters = 100;
  int grid_n = 128;             // dual scan grid per axis
  double ins_tol = 1e-8;        // stop once max |p| <= alpha + ins_tol
  double prune_tol = 1e-12;     // atoms with |w| <= prune_tol are removed
  double weight_tol = 1e-10;    // proximal gradient stopping tolerance
  int max_weight_iters = 200000;
  bool refine = true;           // joint (weight, position) polish after each insertion
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double max_abs_p = 0.0;
  std::size_t atoms = 0;
};

struct SolveResult {
  DiscreteMeasure u;
  std::vector<IterationRecord> log;
  FirstOrderReport first_order;
};

/// Minimizes sum_j L(K w) + alpha |w|_1 over the weights of atoms at fixed
/// positions by accelerated proximal gradient with adaptive restart (step
/// 1 / Lipschitz of the smooth part), followed by a Newton polish on the
/// detected sign pattern. Never returns weights with a larger objective than
/// `start`.
Vector solve_weights(const Problem& problem, const std::vector<Point>& positions,
                     const Vector& start, double tol = 1e-10, int max_iters = 200000);

/// Generalized conditional gradient: insert the maximizer of |p|, re-solve
/// the weights, polish, prune, until max |p| <= alpha + ins_tol. The result
/// is checked with check_first_order at 10 ins_tol. Throws NonConvergence
/// when the iteration budget runs out or the final check fails.
SolveResult solve_gcg(const Problem& problem, const SolverConfig& config = {});

struct RefineOptions {
  int max_iters = 200;
  double grad_tol = 1e-13;
};

/// Joint local minimization of J over weights and positions with the signs
/// of the weights frozen: damped Newton (Levenberg-Marquardt) steps with
/// acceptance on J, positions projected onto the domain. J never increases.
DiscreteMeasure refine_positions(const Problem& problem, const DiscreteMeasure& u,
                                 const RefineOptions& options = {});

/// CSV with header iteration,objective,max_abs_p,atoms.
void write_iterations_csv(std::ostream& os, const std::vector<IterationRecord>& log);

}  // namespace radon

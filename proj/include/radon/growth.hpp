#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "radon/optimality.hpp"

namespace radon {

struct GrowthConfig {
  double eps = 0.0;            // <= 0: default_eps()
  int n_radii = 7;             // log-spaced in [eps/100, eps]
  int random_directions = 4;   // random weight and position directions per radius
  int random_inactive = 3;     // new atoms at random points away from the support
  unsigned seed = 42;
  double gamma_tol = 1e-6;
  double gap_tol = 1e-12;      // gaps below -gap_tol count as descent
  double max_decay_slope = 1.0;
  double min_bl = 1e-12;       // smaller distances are skipped
};

/// Perturbed measure u' = u + delta together with its provenance.
struct Perturbation {
  std::string tag;      // family and direction, independent of the radius
  std::string family;   // weight, shift, touching, inactive, splitter, mass_split
  int radius_index = 0;
  double radius = 0.0;
  DiscreteMeasure measure;
};

/// Half the minimum of the pairwise atom distance, the distance of the atoms
/// to the boundary and r0. Falls back to 5% of the diameter when none of
/// these is available.
double default_eps(const DiscreteMeasure& u, const ActiveSets& sets, const Domain& domain);

/// Radii eps * 100^(-k / (n - 1)), k = 0..n-1.
std::vector<double> growth_radii(double eps, int n);

/// Seeded perturbations of u in six families: weight changes at the support
/// (single, pairwise and random combinations), position shifts, new atoms on
/// I+- candidates, new atoms at random inactive points, the symmetric second
/// difference splitter and the mass split. Atoms that would leave the domain
/// are dropped from the list.
std::vector<Perturbation> sample_perturbations(const DiscreteMeasure& u, const ActiveSets& sets,
                                               const Domain& domain,
                                               const GrowthConfig& config = {});

struct GrowthSample {
  std::string tag;
  std::string family;
  int radius_index = 0;
  double radius = 0.0;
  double bl_distance = 0.0;
  double gap = 0.0;       // J(u') - J(u)
  double ratio = 0.0;     // gap / bl_distance^2
};

struct RadiusProfile {
  double radius = 0.0;
  double gamma = 0.0;     // min ratio at this radius
  std::string argmin_tag;
};

struct GrowthReport {
  std::vector<GrowthSample> samples;  // sorted by tag, then radius
  std::vector<std::string> skipped;   // tags with BL distance below min_bl
  double gamma_hat = 0.0;             // min ratio over samples with bl <= eps
  std::string gamma_argmin;
  double min_gap = 0.0;
  double eps = 0.0;
  std::vector<RadiusProfile> profile;  // decreasing radius
  /// Least-squares slope of log gamma against log radius over the smaller
  /// half of the radii; NaN if one of those gammas is not positive.
  double decay_slope = 0.0;
  double gamma_tol = 0.0;
  bool pass = false;
};

/// Evaluates J and the BL distance for every perturbation. Passes iff
/// gamma_hat > gamma_tol, no gap is below -gap_tol and gamma does not decay
/// like a positive power of the radius (decay_slope < max_decay_slope).
GrowthReport growth_ratio(const Problem& problem, const DiscreteMeasure& u,
                          const std::vector<Perturbation>& samples, double eps,
                          const GrowthConfig& config = {});

/// Convenience: default eps, sampling and evaluation in one call.
GrowthReport growth_check(const Problem& problem, const DiscreteMeasure& u,
                          const ActiveSets& sets, GrowthConfig config = {});

/// CSV with header tag,family,radius,bl_distance,gap,ratio.
void write_growth_csv(std::ostream& os, const GrowthReport& report);

}  // namespace radon

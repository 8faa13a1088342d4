#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radon/model.hpp"

namespace radon {

/// A problem together with (optionally) a known stationary point.
struct Scenario {
  std::string name;
  std::string description;
  Problem problem;
  std::optional<DiscreteMeasure> measure;
  bool degenerate = false;  // designed to violate the curvature conditions
};

/// Interpolation constraint on p = (k(.), w): p(x) = value and grad p(x) = 0,
/// plus Hess p(x) = 0 when `flat` is set.
struct CertificateNode {
  Point x;
  double value = 0.0;
  bool flat = false;
};

/// Minimum-norm w with (k(x), w) = value, Dk(x)^T w = 0 (and D^2 k(x)[w] = 0
/// for flat nodes) at every node.
Vector min_norm_certificate(const Kernel& kernel, const std::vector<CertificateNode>& nodes);

/// Quadratic-loss problem whose data y_d = K u + w makes u stationary with
/// dual variable p = (k(.), w), where w is the minimum-norm certificate
/// through the atoms of u (value sgn(w_j) alpha) and through the extra
/// `touching` nodes. Throws Error when the resulting p exceeds alpha on a
/// verification grid, i.e. the construction does not certify u.
Scenario stationary_instance(std::string name, Domain domain, Kernel kernel, double alpha,
                             const DiscreteMeasure& u, bool flat = false,
                             const std::vector<CertificateNode>& touching = {});

/// One sensor at 0.5 with bandwidth 0.5 on [0, 1], y_d = 2.5, alpha = 0.5:
/// u = 2 delta_0.5 with p(0.5) = alpha, p'' = -2.
Scenario exact_gaussian_1d();

/// Anisotropic Gaussian at (0.5, 0.5) with bandwidths (1/sqrt 3, 1) on
/// [0, 1]^2, y_d = 2, alpha = 1: u = delta_(0.5,0.5), Hess p = diag(-3, -1).
Scenario exact_gaussian_2d();

/// Two opposite-sign spikes, Gaussian sensors on a 21-point grid.
Scenario nondegenerate_two_spike();

/// Three spikes of mixed sign.
Scenario nondegenerate_three_spike();

/// One spike plus a touching point of p = alpha away from the support.
Scenario touching_point();

/// One spike at `center` whose dual variable has vanishing Hessian there
/// (sensors placed symmetrically around it).
Scenario flat_hessian(double center = 0.5, double bandwidth = 0.1, double alpha = 0.1,
                      int sensors = 17, double half_width = 0.4);

/// Fourier features with frequencies 2 pi {1, 2, 3} on [0, 2]: the columns
/// at x0 and x0 + 1 coincide; u has atoms at both.
Scenario duplicated_columns(double x0 = 0.4, double alpha = 0.3, double w0 = 1.0,
                            double w1 = 0.5);

/// Noiseless data from a two-atom ground truth (returned as `measure`) with
/// 16 Gaussian sensors.
Scenario two_spike_recovery(double alpha = 1e-5);

/// Data whose correlation sup |(k, y_d)| is below alpha, so u = 0 is optimal.
Scenario below_threshold();

std::vector<Scenario> nondegenerate_suite();
std::vector<Scenario> degenerate_suite();

/// The scenario files shipped in scenarios/: "nondegenerate" (problem only,
/// solved on the fly) and "flat_hessian" (problem and measure).
std::vector<Scenario> bundled_scenarios();

}  // namespace radon

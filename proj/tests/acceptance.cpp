// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance <radon_cert binary> <scenario dir>

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radon/growth.hpp"
#include "radon/io.hpp"
#include "radon/optimality.hpp"
#include "radon/scenarios.hpp"
#include "radon/second_order.hpp"
#include "radon/solver.hpp"
#include "radon/transport.hpp"

using namespace radon;
namespace fs = std::filesystem;

namespace {

std::string g_binary;
std::string g_scenarios;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Point random_point(std::mt19937_64& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Point x(d);
  for (int l = 0; l < d; ++l) x[l] = U(rng);
  return x;
}

DiscreteMeasure random_measure(std::mt19937_64& rng, int d, int n, double scale) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Atom> raw;
  for (int i = 0; i < n; ++i) {
    double w = 0.1 + 1.9 * U(rng);
    if (U(rng) < 0.5) w = -w;
    raw.push_back(Atom{random_point(rng, d, 0.0, scale), w});
  }
  return DiscreteMeasure::canonicalize(raw, d);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// 1. Flat norm of a Dirac pair and of a second difference.
Outcome bl_examples() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 2;
    const Point x1 = random_point(rng, d, 0.0, 4.0);
    const Point x2 = random_point(rng, d, 0.0, 4.0);
    const auto pair = DiscreteMeasure::canonicalize({Atom{x1, 1.0}, Atom{x2, -1.0}}, d);
    worst = std::max(worst, std::abs(bl_norm(pair) - std::min(2.0, (x1 - x2).norm())));

    const Point x = random_point(rng, d, 0.0, 4.0);
    const Point h = random_point(rng, d, -3.0, 3.0);
    const auto second = DiscreteMeasure::canonicalize(
        {Atom{x, 2.0}, Atom{x + h, -1.0}, Atom{x - h, -1.0}}, d);
    worst = std::max(worst, std::abs(bl_norm(second) - 2.0 * std::min(2.0, h.norm())));
  }
  return {worst <= 1e-8, "max abs error " + fmt(worst)};
}

// 2. Primal flat-norm LP against the dual oracle.
Outcome primal_dual() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> atoms(1, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    const auto u = random_measure(rng, d, atoms(rng), 3.0);
    worst = std::max(worst, std::abs(bl_norm(u) - bl_dual_oracle(u)));
  }
  return {worst <= 1e-7, "max |primal - dual| " + fmt(worst)};
}

// 3. Zero-mass measures on domains of diameter <= 2.
Outcome w1_identity() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> atoms(1, 6);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 2;
    const Domain dom = Domain::unit(d);  // diameter 1 or sqrt 2
    std::vector<Atom> raw;
    double plus = 0.0, minus = 0.0;
    const int np = atoms(rng), nm = atoms(rng);
    for (int i = 0; i < np; ++i) {
      raw.push_back(Atom{random_point(rng, d, 0.0, 1.0), U(rng)});
      plus += raw.back().w;
    }
    std::vector<double> w(static_cast<std::size_t>(nm));
    for (auto& wi : w) {
      wi = U(rng);
      minus += wi;
    }
    for (int i = 0; i < nm; ++i) {
      raw.push_back(Atom{random_point(rng, d, 0.0, 1.0), -w[static_cast<std::size_t>(i)] * plus / minus});
    }
    const auto u = DiscreteMeasure::canonicalize(raw, dom);
    const auto [up, um] = jordan_decompose(u);
    worst = std::max(worst, std::abs(bl_norm(u) - w1(up, um).first));
  }
  return {worst <= 1e-9, "max |bl - w1| " + fmt(worst)};
}

std::vector<Problem> derivative_instances() {
  std::vector<Problem> out;
  for (const Scenario& s : nondegenerate_suite()) out.push_back(s.problem);
  std::mt19937_64 rng(4);
  Matrix centers(9, 2);
  for (int i = 0; i < 9; ++i) centers.row(i) = random_point(rng, 2, 0.0, 1.0).transpose();
  Vector bw(2);
  bw << 0.2, 0.35;
  Vector y(9);
  for (auto& v : y) v = std::normal_distribution<double>(0, 1)(rng);
  out.emplace_back(Domain::unit(2), Kernel::gaussian(centers, bw), Loss::nonconvex_demo(y, 0.8), 0.1);
  Matrix freq(3, 2);
  freq << 1, 2, -2, 1, 3, 0.5;
  Vector yf(6);
  for (auto& v : yf) v = std::normal_distribution<double>(0, 1)(rng);
  out.emplace_back(Domain::unit(2), Kernel::fourier(2 * std::numbers::pi * freq),
                   Loss::quadratic(yf), 0.1);
  return out;
}

// 4. Analytic derivatives of p against central differences.
Outcome derivatives() {
  std::mt19937_64 rng(5);
  double worst_g = 0.0, worst_h = 0.0;
  for (const Problem& P : derivative_instances()) {
    const int d = P.domain.dim();
    const DualVariable p(P, random_measure(rng, d, 3, 1.0));
    for (int s = 0; s < 100; ++s) {
      const Point x = random_point(rng, d, 0.05, 0.95);
      const Vector g = p.gradient(x);
      const Matrix H = p.hessian(x);
      Vector fg(d);
      Matrix fh(d, d);
      for (int l = 0; l < d; ++l) {
        const Point e = Point::Unit(d, l);
        fg[l] = (p.value(x + 1e-5 * e) - p.value(x - 1e-5 * e)) / 2e-5;
        fh.col(l) = (p.gradient(x + 1e-4 * e) - p.gradient(x - 1e-4 * e)) / 2e-4;
      }
      worst_g = std::max(worst_g, (g - fg).norm() / (1 + g.norm()));
      worst_h = std::max(worst_h, (H - fh).norm() / (1 + H.norm()));
    }
  }
  return {worst_g <= 1e-6 && worst_h <= 1e-4,
          "gradient " + fmt(worst_g) + ", hessian " + fmt(worst_h)};
}

struct Certified {
  Problem problem;
  DiscreteMeasure u;
  ActiveSets sets;
};

Certified bundled_nondegenerate() {
  const ConfigFile cfg = load_config(g_scenarios + "/nondegenerate.json");
  DiscreteMeasure u = cfg.measure ? *cfg.measure : solve_gcg(cfg.problem, cfg.settings.solver).u;
  ActiveSets sets = active_sets(cfg.problem, u, cfg.settings.grid_n);
  return {cfg.problem, std::move(u), std::move(sets)};
}

// 5. Recovery quotients converge linearly to the second subderivative.
Outcome recovery() {
  const Certified c = bundled_nondegenerate();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> mag(0.5, 1.0), U(-1.0, 1.0);
  double lo = kInfinity, hi = -kInfinity;
  for (int trial = 0; trial < 10; ++trial) {
    Direction dir = Direction::zero(c.u.size(), 1);
    for (std::size_t j = 0; j < c.u.size(); ++j) {
      dir.c[static_cast<Eigen::Index>(j)] = (U(rng) < 0 ? -1 : 1) * mag(rng);
      dir.V[j] = Point::Constant(1, 0.3 * U(rng));
    }
    const double exact = second_subderivative(c.problem, c.u, c.sets, dir);
    const double e1 = std::abs(recovery_quotient(c.problem, c.u, c.sets, dir, 1e-2) - exact);
    const double e2 = std::abs(recovery_quotient(c.problem, c.u, c.sets, dir, 5e-3) - exact);
    // Fitted C from the first point must bound the second.
    const double C = e1 / 1e-2;
    if (e2 > C * 5e-3 * 1.5) return {false, "error at t = 5e-3 exceeds C t"};
    lo = std::min(lo, e1 / e2);
    hi = std::max(hi, e1 / e2);
  }
  return {lo >= 1.5 && hi <= 2.5, "error ratios in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

// 6. Second-difference probe against its closed-form limit.
Outcome ndc() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst = 0.0;
  const Scenario s = exact_gaussian_2d();
  for (int trial = 0; trial < 20; ++trial) {
    Point v(2);
    v << N(rng), N(rng);
    v.normalize();
    const double limit = ndc_limit(s.problem, *s.measure, 0, v);
    const double q = ndc_probe(s.problem, *s.measure, 0, v, 1e-3);
    worst = std::max(worst, std::abs(q - limit) / std::abs(limit));
  }
  const Certified c = bundled_nondegenerate();
  for (std::size_t j = 0; j < c.u.size(); ++j) {
    for (double sgn : {-1.0, 1.0}) {
      const Point v = Point::Constant(1, sgn);
      const double limit = ndc_limit(c.problem, c.u, j, v);
      worst = std::max(worst, std::abs(ndc_probe(c.problem, c.u, j, v, 1e-3) - limit) / std::abs(limit));
    }
  }
  return {worst <= 0.05, "max relative deviation " + fmt(worst)};
}

// 7. Structural and empirical verdicts agree; degenerate instances decay.
Outcome no_gap() {
  std::vector<Scenario> all = nondegenerate_suite();
  const auto degenerate = degenerate_suite();
  all.insert(all.end(), degenerate.begin(), degenerate.end());
  int agree = 0, decaying = 0, n_degenerate = 0;
  std::string notes;
  for (const Scenario& s : all) {
    if (!s.problem.loss.strongly_convex()) return {false, s.name + ": loss not strongly convex"};
    const DiscreteMeasure& u = *s.measure;
    const ActiveSets sets = active_sets(s.problem, u, 256);
    const SecondOrderReport so = check_C_conditions(s.problem, u, sets);
    const GrowthConfig cfg;
    const GrowthReport gr = growth_check(s.problem, u, sets, cfg);
    if (so.b1 == gr.pass && so.b1 == !s.degenerate) {
      ++agree;
    } else {
      notes += " " + s.name + "(b1=" + std::to_string(so.b1) + ",b2=" + std::to_string(gr.pass) + ")";
    }
    if (s.degenerate) {
      ++n_degenerate;
      // Over the small-radius half: gamma(r') <= gamma(r) r' / r, i.e. at
      // least a factor 2 per halving, until gamma is numerically zero.
      bool ok = gr.profile.size() >= 4;
      for (std::size_t k = gr.profile.size() / 2; ok && k + 1 < gr.profile.size(); ++k) {
        const double shrink = gr.profile[k + 1].radius / gr.profile[k].radius;
        ok = gr.profile[k + 1].gamma <= std::max(gr.profile[k].gamma * shrink, cfg.gamma_tol);
      }
      if (ok) {
        ++decaying;
      } else {
        notes += " " + s.name + "(no decay)";
      }
    }
  }
  const bool pass = agree == static_cast<int>(all.size()) && all.size() == 10 &&
                    n_degenerate == 5 && decaying == n_degenerate;
  return {pass, std::to_string(agree) + "/" + std::to_string(all.size()) + " agree, " +
                    std::to_string(decaying) + "/" + std::to_string(n_degenerate) + " decay" + notes};
}

// 8. Two-spike recovery and the zero solution below the threshold.
Outcome solver_sanity() {
  const Scenario s = two_spike_recovery();
  const SolveResult res = solve_gcg(s.problem);
  if (res.u.size() != s.measure->size()) {
    return {false, "recovered " + std::to_string(res.u.size()) + " atoms"};
  }
  double err = 0.0;
  for (std::size_t j = 0; j < res.u.size(); ++j) {
    err = std::max(err, (res.u[j].x - (*s.measure)[j].x).norm());
  }
  if (err > 1e-3) return {false, "position error " + fmt(err)};

  std::vector<Problem> below = {below_threshold().problem};
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 1 + trial % 2;
    Matrix centers(10, d);
    for (int i = 0; i < 10; ++i) centers.row(i) = random_point(rng, d, 0.0, 1.0).transpose();
    const Kernel k = Kernel::gaussian(centers, 0.15);
    Vector y(10);
    for (auto& v : y) v = std::normal_distribution<double>(0, 1)(rng);
    const Problem probe(Domain::unit(d), k, Loss::quadratic(y), 1.0);
    // p(0) = (k, y_d); put alpha just above its maximum.
    const double sup = global_max_abs(DualVariable(probe, DiscreteMeasure(d)), probe.domain, 256).value;
    below.emplace_back(Domain::unit(d), k, Loss::quadratic(y), sup * (1 + 1e-6));
  }
  for (const Problem& P : below) {
    if (!solve_gcg(P).u.empty()) return {false, "nonzero solution below the threshold"};
  }
  return {true, "position error " + fmt(err) + ", " + std::to_string(below.size()) +
                    " threshold instances give zero"};
}

// 9. Lipschitz embedding and uniform Taylor checks on boxes.
Outcome geometry() {
  const double tp = 2 * std::numbers::pi;
  std::vector<std::pair<TestFunction, double>> family = {
      {{"x^2", [](const Point& x) { return x.squaredNorm(); }, [](const Point& x) { return Vector(2 * x); }}, 0.01},
      {{"sin", [=](const Point& x) { return std::sin(tp * x[0]); },
        [=](const Point& x) {
          Vector g = Vector::Zero(x.size());
          g[0] = tp * std::cos(tp * x[0]);
          return g;
        }},
       0.1},
      {{"gauss", [](const Point& x) { return std::exp(-(x.array() - 0.3).square().sum() / 0.02); },
        [](const Point& x) {
          return Vector(-(x.array() - 0.3) / 0.01 * std::exp(-(x.array() - 0.3).square().sum() / 0.02));
        }},
       0.05},
      {{"pow1.5", [](const Point& x) { return std::pow((x.array() - 0.5).abs().sum(), 1.5); },
        [](const Point& x) {
          const double s = (x.array() - 0.5).abs().sum();
          return Vector(1.5 * std::sqrt(s) * (x.array() - 0.5).sign());
        }},
       0.2},
  };
  int checks = 0;
  for (int d : {1, 2}) {
    const Domain dom(Point::Zero(d), Point::Constant(d, 1.0));
    for (const auto& [phi, eps] : family) {
      const LipschitzReport lip = lipschitz_embedding_check(phi, dom);
      if (!lip.pass) return {false, phi.name + ": Lipschitz check failed in d = " + std::to_string(d)};
      if (!(uniform_taylor_check(phi, dom, eps) > 0.0)) {
        return {false, phi.name + ": no Taylor radius in d = " + std::to_string(d)};
      }
      checks += 2;
    }
    const TestFunction affine{"affine", [](const Point& x) { return x.sum() - 1; },
                              [](const Point& x) { return Vector(Vector::Ones(x.size())); }};
    if (std::abs(uniform_taylor_check(affine, dom, 1e-3) - dom.diameter()) > 1e-12) {
      return {false, "affine Taylor radius is not the diameter"};
    }
    ++checks;
  }
  return {true, std::to_string(checks) + " checks"};
}

// 10. Two certify runs with the same seed give identical reports.
Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("radon_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::vector<std::string> reports;
  for (const char* run : {"a", "b"}) {
    const fs::path out = base / run;
    const std::string cmd = "\"" + g_binary + "\" certify --config \"" + g_scenarios +
                            "/nondegenerate.json\" --seed 11 --out \"" + out.string() + "\" > /dev/null";
    const int code = std::system(cmd.c_str());
    if (code != 0) {
      fs::remove_all(base);
      return {false, "certify exited with status " + std::to_string(code)};
    }
    reports.push_back(read_file((out / "report.json").string()));
  }
  fs::remove_all(base);
  const bool same = reports[0] == reports[1];
  return {same, same ? std::to_string(reports[0].size()) + " identical bytes" : "reports differ"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <radon_cert> <scenario dir>\n";
    return 2;
  }
  g_binary = argv[1];
  g_scenarios = argv[2];

  struct Criterion {
    int id;
    std::string name;
    double budget_s;  // <= 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "flat norm of Dirac pairs and second differences", 5, bl_examples},
      {2, "flat-norm LP matches the dual oracle", 30, primal_dual},
      {3, "flat norm equals W1 for zero-mass measures", 0, w1_identity},
      {4, "analytic derivatives match central differences", 0, derivatives},
      {5, "recovery quotients converge linearly", 10, recovery},
      {6, "second-difference probe matches its limit", 0, ndc},
      {7, "structural and growth verdicts agree", 120, no_gap},
      {8, "solver recovers spikes and the zero solution", 30, solver_sanity},
      {9, "Lipschitz and uniform Taylor checks", 0, geometry},
      {10, "certify is deterministic", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += ", over the " + fmt(c.budget_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("%s criterion %d: %s (%s) [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs);
  }
  return failures == 0 ? 0 : 1;
}

#include "radon/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <tuple>

#include "radon/errors.hpp"
#include "radon/parallel.hpp"
#include "radon/transport.hpp"

namespace radon {

double default_eps(const DiscreteMeasure& u, const ActiveSets& sets, const Domain& domain) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    m = std::min(m, domain.distance_to_boundary(u[i].x));
    for (std::size_t j = i + 1; j < u.size(); ++j) m = std::min(m, (u[i].x - u[j].x).norm());
  }
  if (sets.r0 > 0.0) m = std::min(m, sets.r0);
  if (!std::isfinite(m) || m <= 0.0) return 0.05 * domain.diameter();
  return 0.5 * m;
}

std::vector<double> growth_radii(double eps, int n) {
  if (n < 1) throw Error("growth_radii: need at least one radius");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    r[static_cast<std::size_t>(k)] = n == 1 ? eps : eps * std::pow(100.0, -double(k) / (n - 1));
  }
  return r;
}

namespace {

Point random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> N01(0.0, 1.0);
  Point v(d);
  do {
    for (int l = 0; l < d; ++l) v[l] = N01(rng);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

struct NamedVector {
  std::string name;
  Point v;
};

class Builder {
 public:
  Builder(const DiscreteMeasure& u, const Domain& domain, std::vector<Perturbation>& out)
      : u_(u), domain_(domain), out_(out) {}

  void add(const std::string& family, const std::string& tag, int k, double r,
           const std::vector<Atom>& delta) {
    for (const auto& a : delta) {
      if (!domain_.contains(a.x)) return;
    }
    std::vector<Atom> atoms = u_.atoms();
    atoms.insert(atoms.end(), delta.begin(), delta.end());
    Perturbation p;
    p.family = family;
    p.tag = family + ":" + tag;
    p.radius_index = k;
    p.radius = r;
    p.measure = DiscreteMeasure::canonicalize(atoms, domain_);
    out_.push_back(std::move(p));
  }

 private:
  const DiscreteMeasure& u_;
  const Domain& domain_;
  std::vector<Perturbation>& out_;
};

}  // namespace

std::vector<Perturbation> sample_perturbations(const DiscreteMeasure& u, const ActiveSets& sets,
                                               const Domain& domain, const GrowthConfig& config) {
  const double eps = config.eps > 0.0 ? config.eps : default_eps(u, sets, domain);
  const auto radii = growth_radii(eps, config.n_radii);
  const int d = domain.dim();
  const std::size_t N = u.size();
  std::mt19937_64 rng(config.seed);

  // Radius-independent directions, drawn once so every radius sees the same set.
  std::vector<NamedVector> dirs;
  for (int l = 0; l < d; ++l) {
    dirs.push_back({"+x" + std::to_string(l), Point::Unit(d, l)});
    dirs.push_back({"-x" + std::to_string(l), -Point::Unit(d, l)});
  }
  for (int s = 0; s < config.random_directions; ++s) {
    dirs.push_back({"r" + std::to_string(s), random_unit(rng, d)});
  }
  std::vector<Vector> weight_dirs;
  std::normal_distribution<double> N01(0.0, 1.0);
  if (N > 0) {
    for (int s = 0; s < config.random_directions; ++s) {
      Vector c(static_cast<Eigen::Index>(N));
      for (auto& ci : c) ci = N01(rng);
      weight_dirs.push_back(c / c.lpNorm<1>());
    }
  }
  std::vector<Atom> inactive;
  {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto far_from_active = [&](const Point& x) {
      for (const auto& a : u.atoms()) {
        if ((a.x - x).norm() < 2.0 * eps) return false;
      }
      for (const auto* list : {&sets.i_plus, &sets.i_minus}) {
        for (const auto& z : *list) {
          if ((z.x - x).norm() < 2.0 * eps) return false;
        }
      }
      return true;
    };
    for (int s = 0; s < config.random_inactive; ++s) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        Point x(d);
        for (int l = 0; l < d; ++l) {
          x[l] = domain.lower()[l] + U(rng) * (domain.upper()[l] - domain.lower()[l]);
        }
        const double sign = U(rng) < 0.5 ? -1.0 : 1.0;
        if (far_from_active(x)) {
          inactive.push_back(Atom{x, sign});
          break;
        }
      }
    }
  }

  std::vector<Perturbation> out;
  Builder b(u, domain, out);
  for (int k = 0; k < config.n_radii; ++k) {
    const double r = radii[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < N; ++j) {
      const std::string a = "a" + std::to_string(j);
      const Atom& at = u[j];
      const double lam = std::abs(at.w);
      b.add("weight", a + "+", k, r, {Atom{at.x, r}});
      b.add("weight", a + "-", k, r, {Atom{at.x, -r}});
      for (std::size_t i = j + 1; i < N; ++i) {
        const std::string ai = a + "a" + std::to_string(i);
        b.add("weight", ai + "++", k, r, {Atom{at.x, r / 2}, Atom{u[i].x, r / 2}});
        b.add("weight", ai + "+-", k, r, {Atom{at.x, r / 2}, Atom{u[i].x, -r / 2}});
        b.add("weight", ai + "-+", k, r, {Atom{at.x, -r / 2}, Atom{u[i].x, r / 2}});
        b.add("weight", ai + "--", k, r, {Atom{at.x, -r / 2}, Atom{u[i].x, -r / 2}});
      }
      for (const auto& v : dirs) {
        const double h = std::min(r / lam, eps);
        b.add("shift", a + ":" + v.name, k, r,
              {Atom{at.x + h * v.v, at.w}, Atom{at.x, -at.w}});
        const double hm = std::min(2.0 * r / lam, eps);
        b.add("mass_split", a + ":" + v.name, k, r,
              {Atom{at.x + hm * v.v, at.w / 2}, Atom{at.x, -at.w / 2}});
        if (v.name[0] != '-') {
          b.add("splitter", a + ":" + v.name, k, r,
                {Atom{at.x - h * v.v, at.w / 2}, Atom{at.x, -at.w}, Atom{at.x + h * v.v, at.w / 2}});
        }
      }
    }
    for (std::size_t s = 0; s < weight_dirs.size(); ++s) {
      std::vector<Atom> delta;
      for (std::size_t j = 0; j < N; ++j) {
        delta.push_back(Atom{u[j].x, r * weight_dirs[s][static_cast<Eigen::Index>(j)]});
      }
      b.add("weight", "r" + std::to_string(s), k, r, delta);
    }
    for (std::size_t s = 0; s < sets.i_plus.size(); ++s) {
      b.add("touching", "+" + std::to_string(s), k, r, {Atom{sets.i_plus[s].x, r}});
    }
    for (std::size_t s = 0; s < sets.i_minus.size(); ++s) {
      b.add("touching", "-" + std::to_string(s), k, r, {Atom{sets.i_minus[s].x, -r}});
    }
    for (std::size_t s = 0; s < inactive.size(); ++s) {
      b.add("inactive", std::to_string(s), k, r, {Atom{inactive[s].x, r * inactive[s].w}});
    }
  }
  return out;
}

GrowthReport growth_ratio(const Problem& problem, const DiscreteMeasure& u,
                          const std::vector<Perturbation>& samples, double eps,
                          const GrowthConfig& config) {
  const double j0 = objective(problem, u);
  std::vector<GrowthSample> evaluated(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const Perturbation& p = samples[i];
    GrowthSample& s = evaluated[i];
    s.tag = p.tag;
    s.family = p.family;
    s.radius_index = p.radius_index;
    s.radius = p.radius;
    s.bl_distance = bl_norm(p.measure - u);
    s.gap = objective(problem, p.measure) - j0;
    s.ratio = s.bl_distance > 0.0 ? s.gap / (s.bl_distance * s.bl_distance)
                                   : std::numeric_limits<double>::infinity();
  });

  GrowthReport rep;
  rep.eps = eps;
  rep.gamma_tol = config.gamma_tol;
  for (auto& s : evaluated) {
    if (s.bl_distance < config.min_bl) {
      rep.skipped.push_back(s.tag);
    } else {
      rep.samples.push_back(std::move(s));
    }
  }
  std::sort(rep.samples.begin(), rep.samples.end(),
            [](const GrowthSample& a, const GrowthSample& b) {
              return std::tie(a.tag, a.radius_index) < std::tie(b.tag, b.radius_index);
            });

  rep.gamma_hat = std::numeric_limits<double>::infinity();
  rep.min_gap = std::numeric_limits<double>::infinity();
  int n_radii = 0;
  for (const auto& s : rep.samples) n_radii = std::max(n_radii, s.radius_index + 1);
  std::vector<RadiusProfile> prof(static_cast<std::size_t>(n_radii));
  std::vector<bool> seen(prof.size(), false);
  const double bl_cap = eps * (1.0 + 1e-9);
  for (const auto& s : rep.samples) {
    rep.min_gap = std::min(rep.min_gap, s.gap);
    if (s.bl_distance > bl_cap) continue;
    if (s.ratio < rep.gamma_hat) {
      rep.gamma_hat = s.ratio;
      rep.gamma_argmin = s.tag;
    }
    auto& p = prof[static_cast<std::size_t>(s.radius_index)];
    if (!seen[static_cast<std::size_t>(s.radius_index)] || s.ratio < p.gamma) {
      p.gamma = s.ratio;
      p.radius = s.radius;
      p.argmin_tag = s.tag;
      seen[static_cast<std::size_t>(s.radius_index)] = true;
    }
  }
  for (std::size_t k = 0; k < prof.size(); ++k) {
    if (seen[k]) rep.profile.push_back(prof[k]);
  }

  // Fit log gamma = a + slope * log r over the smaller half of the radii.
  rep.decay_slope = 0.0;
  if (rep.profile.size() >= 2) {
    const std::size_t tail = std::max<std::size_t>(2, (rep.profile.size() + 1) / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool positive = true;
    for (std::size_t k = rep.profile.size() - tail; k < rep.profile.size(); ++k) {
      const auto& p = rep.profile[k];
      if (!(p.gamma > 0.0)) {
        positive = false;
        break;
      }
      const double x = std::log(p.radius), y = std::log(p.gamma);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(tail);
    rep.decay_slope = positive ? (n * sxy - sx * sy) / (n * sxx - sx * sx)
                               : std::numeric_limits<double>::quiet_NaN();
  }

  rep.pass = rep.gamma_hat > config.gamma_tol && rep.min_gap >= -config.gap_tol &&
             std::isfinite(rep.decay_slope) && rep.decay_slope < config.max_decay_slope;
  return rep;
}

GrowthReport growth_check(const Problem& problem, const DiscreteMeasure& u,
                          const ActiveSets& sets, GrowthConfig config) {
  if (config.eps <= 0.0) config.eps = default_eps(u, sets, problem.domain);
  const auto samples = sample_perturbations(u, sets, problem.domain, config);
  return growth_ratio(problem, u, samples, config.eps, config);
}

void write_growth_csv(std::ostream& os, const GrowthReport& report) {
  os << "tag,family,radius,bl_distance,gap,ratio\n";
  os.precision(17);
  for (const auto& s : report.samples) {
    os << s.tag << ',' << s.family << ',' << s.radius << ',' << s.bl_distance << ',' << s.gap
       << ',' << s.ratio << '\n';
  }
}

}  // namespace radon

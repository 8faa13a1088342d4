#include "radon/io.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "radon/errors.hpp"

namespace radon {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("field '" + where + "': " + what);
}

std::string child(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string item(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

void check_keys(const Json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(child(where, key), "unknown field");
  }
}

const Json& require(const Json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) fail(child(where, key), "missing");
  return j.at(key);
}

double as_number(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Vector as_vector(const Json& j, const std::string& where, Eigen::Index expected = -1) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    fail(where, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], item(where, i));
  return v;
}

Matrix as_rows(const Json& j, const std::string& where, Eigen::Index cols) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of points");
  Matrix M(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    M.row(static_cast<Eigen::Index>(i)) = as_vector(j[i], item(where, i), cols).transpose();
  }
  return M;
}

Domain parse_domain(const Json& j, const std::string& where) {
  check_keys(j, where, {"lower", "upper"});
  const Vector lo = as_vector(require(j, where, "lower"), child(where, "lower"));
  if (lo.size() == 0) fail(child(where, "lower"), "empty");
  const Vector hi = as_vector(require(j, where, "upper"), child(where, "upper"), lo.size());
  try {
    return Domain(lo, hi);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Kernel parse_kernel(const Json& j, const std::string& where, int d) {
  const std::string family = as_string(require(j, where, "family"), child(where, "family"));
  if (family == "gaussian") {
    check_keys(j, where, {"family", "centers", "bandwidth"});
    const Matrix centers = as_rows(require(j, where, "centers"), child(where, "centers"), d);
    const Json& bw = require(j, where, "bandwidth");
    Vector b = bw.is_array() ? as_vector(bw, child(where, "bandwidth"), d)
                             : Vector::Constant(d, as_number(bw, child(where, "bandwidth")));
    if ((b.array() <= 0.0).any()) fail(child(where, "bandwidth"), "must be positive");
    return Kernel::gaussian(centers, b);
  }
  if (family == "fourier") {
    check_keys(j, where, {"family", "frequencies"});
    return Kernel::fourier(as_rows(require(j, where, "frequencies"), child(where, "frequencies"), d));
  }
  fail(child(where, "family"), "unknown kernel family '" + family + "'");
}

/// Observation data inline or as a path to a CSV file of numbers, resolved
/// against the directory of the config file.
Vector parse_data(const Json& j, const std::string& where, const std::filesystem::path& base) {
  if (!j.is_string()) return as_vector(j, where);
  std::filesystem::path path = j.get<std::string>();
  if (path.is_relative()) path = base / path;
  std::ifstream in(path);
  if (!in) fail(where, "cannot open data file " + path.string());
  std::vector<double> values;
  std::string token;
  char c;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) fail(where, path.string() + ": not a number: '" + token + "'");
    values.push_back(v);
    token.clear();
  };
  while (in.get(c)) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  if (values.empty()) fail(where, path.string() + ": no values");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Loss parse_loss(const Json& j, const std::string& where, const std::filesystem::path& base) {
  const std::string family = as_string(require(j, where, "family"), child(where, "family"));
  if (family == "quadratic") {
    check_keys(j, where, {"family", "data"});
    return Loss::quadratic(parse_data(require(j, where, "data"), child(where, "data"), base));
  }
  if (family == "nonconvex_demo") {
    check_keys(j, where, {"family", "data", "beta"});
    return Loss::nonconvex_demo(parse_data(require(j, where, "data"), child(where, "data"), base),
                                as_number(require(j, where, "beta"), child(where, "beta")));
  }
  fail(child(where, "family"), "unknown loss family '" + family + "'");
}

void parse_solver(const Json& j, const std::string& where, SolverConfig& s) {
  check_keys(j, where, {"max_iters", "grid_n", "ins_tol", "prune_tol", "weight_tol", "refine"});
  if (j.contains("max_iters")) s.max_iters = as_int(j["max_iters"], child(where, "max_iters"));
  if (j.contains("grid_n")) s.grid_n = as_int(j["grid_n"], child(where, "grid_n"));
  if (j.contains("ins_tol")) s.ins_tol = as_number(j["ins_tol"], child(where, "ins_tol"));
  if (j.contains("prune_tol")) s.prune_tol = as_number(j["prune_tol"], child(where, "prune_tol"));
  if (j.contains("weight_tol")) s.weight_tol = as_number(j["weight_tol"], child(where, "weight_tol"));
  if (j.contains("refine")) s.refine = as_bool(j["refine"], child(where, "refine"));
  if (s.grid_n < 2) fail(child(where, "grid_n"), "must be at least 2");
}

void parse_growth(const Json& j, const std::string& where, GrowthConfig& g) {
  check_keys(j, where, {"eps", "n_radii", "random_directions", "random_inactive", "seed",
                        "gamma_tol", "max_decay_slope"});
  if (j.contains("eps")) g.eps = as_number(j["eps"], child(where, "eps"));
  if (j.contains("n_radii")) g.n_radii = as_int(j["n_radii"], child(where, "n_radii"));
  if (j.contains("random_directions")) {
    g.random_directions = as_int(j["random_directions"], child(where, "random_directions"));
  }
  if (j.contains("random_inactive")) {
    g.random_inactive = as_int(j["random_inactive"], child(where, "random_inactive"));
  }
  if (j.contains("seed")) g.seed = static_cast<unsigned>(as_int(j["seed"], child(where, "seed")));
  if (j.contains("gamma_tol")) g.gamma_tol = as_number(j["gamma_tol"], child(where, "gamma_tol"));
  if (j.contains("max_decay_slope")) {
    g.max_decay_slope = as_number(j["max_decay_slope"], child(where, "max_decay_slope"));
  }
  if (g.n_radii < 1) fail(child(where, "n_radii"), "must be at least 1");
}

void parse_second_order(const Json& j, const std::string& where, SecondOrderOptions& o) {
  check_keys(j, where, {"theta_tol", "soc_tol", "rank_tol", "boundary_tol"});
  if (j.contains("theta_tol")) o.theta_tol = as_number(j["theta_tol"], child(where, "theta_tol"));
  if (j.contains("soc_tol")) o.soc_tol = as_number(j["soc_tol"], child(where, "soc_tol"));
  if (j.contains("rank_tol")) o.rank_tol = as_number(j["rank_tol"], child(where, "rank_tol"));
  if (j.contains("boundary_tol")) {
    o.boundary_tol = as_number(j["boundary_tol"], child(where, "boundary_tol"));
  }
}

RunSettings parse_settings(const Json& j, const std::string& where) {
  RunSettings s;
  check_keys(j, where, {"grid_n", "tol", "act_tol", "solver", "growth", "second_order"});
  if (j.contains("grid_n")) s.grid_n = as_int(j["grid_n"], child(where, "grid_n"));
  if (s.grid_n < 16) fail(child(where, "grid_n"), "must be at least 16");
  if (j.contains("tol")) s.tol = as_number(j["tol"], child(where, "tol"));
  if (j.contains("act_tol")) s.act_tol = as_number(j["act_tol"], child(where, "act_tol"));
  if (j.contains("solver")) parse_solver(j["solver"], child(where, "solver"), s.solver);
  if (j.contains("growth")) parse_growth(j["growth"], child(where, "growth"), s.growth);
  if (j.contains("second_order")) {
    parse_second_order(j["second_order"], child(where, "second_order"), s.second_order);
  }
  return s;
}

Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ": line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": invalid JSON");
  }
}

}  // namespace

DiscreteMeasure parse_measure(const Json& j, const std::string& where, int dim) {
  check_keys(j, where, {"atoms"});
  const Json& atoms = require(j, where, "atoms");
  if (!atoms.is_array()) fail(child(where, "atoms"), "expected an array");
  std::vector<Atom> raw;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string w = item(child(where, "atoms"), i);
    check_keys(atoms[i], w, {"x", "w"});
    Point x = as_vector(require(atoms[i], w, "x"), child(w, "x"), dim > 0 ? dim : -1);
    if (dim == 0) dim = static_cast<int>(x.size());
    if (x.size() != dim || dim == 0) fail(child(w, "x"), "inconsistent dimension");
    raw.push_back(Atom{std::move(x), as_number(require(atoms[i], w, "w"), child(w, "w"))});
  }
  return DiscreteMeasure::canonicalize(raw, dim);
}

DiscreteMeasure load_measure(const std::string& path, int dim) {
  const Json j = parse_text(read_file(path), path);
  try {
    return parse_measure(j, "", dim);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConfigFile parse_config(const std::string& text, const std::string& source) {
  const Json j = parse_text(text, source);
  const std::filesystem::path base =
      source.empty() || source[0] == '<' ? std::filesystem::current_path()
                                          : std::filesystem::path(source).parent_path();
  try {
    check_keys(j, "", {"name", "description", "domain", "kernel", "loss", "alpha", "measure",
                       "settings"});
    Domain domain = parse_domain(require(j, "", "domain"), "domain");
    const int d = domain.dim();
    Kernel kernel = parse_kernel(require(j, "", "kernel"), "kernel", d);
    Loss loss = parse_loss(require(j, "", "loss"), "loss", base);
    if (loss.dim() != kernel.output_dim()) {
      fail("loss.data", "expected " + std::to_string(kernel.output_dim()) +
                            " entries (kernel output dimension), got " + std::to_string(loss.dim()));
    }
    const double alpha = as_number(require(j, "", "alpha"), "alpha");
    if (!(alpha > 0.0)) fail("alpha", "must be positive");
    ConfigFile cfg{j.contains("name") ? as_string(j["name"], "name") : std::string("unnamed"),
                   j.contains("description") ? as_string(j["description"], "description") : "",
                   Problem(domain, kernel, loss, alpha), std::nullopt, RunSettings{}};
    if (j.contains("measure")) {
      DiscreteMeasure u = parse_measure(j["measure"], "measure", d);
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (!domain.contains(u[i].x)) fail(item("measure.atoms", i), "atom outside the domain");
      }
      cfg.measure = std::move(u);
    }
    if (j.contains("settings")) cfg.settings = parse_settings(j["settings"], "settings");
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

ConfigFile load_config(const std::string& path) { return parse_config(read_file(path), path); }

namespace {

Json vec(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json rows(const Matrix& M) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(vec(M.row(i).transpose()));
  return a;
}

Json local_max(const LocalMax& m) { return Json{{"x", vec(m.x)}, {"value", number(m.value)}}; }

}  // namespace

Json to_json(const DiscreteMeasure& u) {
  Json atoms = Json::array();
  for (const auto& a : u.atoms()) atoms.push_back(Json{{"x", vec(a.x)}, {"w", number(a.w)}});
  return Json{{"atoms", atoms}};
}

Json to_json(const Problem& problem) {
  Json j;
  j["domain"] = Json{{"lower", vec(problem.domain.lower())}, {"upper", vec(problem.domain.upper())}};
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GaussianKernel>) {
          const bool iso = (k.bandwidth.array() == k.bandwidth[0]).all();
          j["kernel"] = Json{{"family", "gaussian"},
                             {"centers", rows(k.centers)},
                             {"bandwidth", iso ? number(k.bandwidth[0]) : vec(k.bandwidth)}};
        } else {
          j["kernel"] = Json{{"family", "fourier"}, {"frequencies", rows(k.frequencies)}};
        }
      },
      problem.kernel.params());
  Json loss{{"family", problem.loss.family_name()}, {"data", vec(problem.loss.data())}};
  if (problem.loss.family() == LossFamily::kNonconvexDemo) loss["beta"] = number(problem.loss.beta());
  j["loss"] = loss;
  j["alpha"] = number(problem.alpha);
  return j;
}

Json to_json(const RunSettings& s) {
  return Json{
      {"grid_n", s.grid_n},
      {"tol", number(s.tol)},
      {"act_tol", number(s.act_tol)},
      {"solver",
       {{"max_iters", s.solver.max_iters},
        {"grid_n", s.solver.grid_n},
        {"ins_tol", number(s.solver.ins_tol)},
        {"prune_tol", number(s.solver.prune_tol)},
        {"weight_tol", number(s.solver.weight_tol)},
        {"refine", s.solver.refine}}},
      {"growth",
       {{"eps", number(s.growth.eps)},
        {"n_radii", s.growth.n_radii},
        {"random_directions", s.growth.random_directions},
        {"random_inactive", s.growth.random_inactive},
        {"seed", s.growth.seed},
        {"gamma_tol", number(s.growth.gamma_tol)},
        {"max_decay_slope", number(s.growth.max_decay_slope)}}},
      {"second_order",
       {{"theta_tol", number(s.second_order.theta_tol)},
        {"soc_tol", number(s.second_order.soc_tol)},
        {"rank_tol", number(s.second_order.rank_tol)},
        {"boundary_tol", number(s.second_order.boundary_tol)}}}};
}

Json to_json(const Scenario& scenario, const RunSettings& settings) {
  Json j{{"name", scenario.name}, {"description", scenario.description}};
  const Json problem = to_json(scenario.problem);
  for (const auto& [k, v] : problem.items()) j[k] = v;
  if (scenario.measure) j["measure"] = to_json(*scenario.measure);
  j["settings"] = to_json(settings);
  return j;
}

Json to_json(const FirstOrderReport& r) {
  return Json{{"max_abs_p", number(r.max_abs_p)},
              {"argmax", vec(r.argmax)},
              {"sup_slack", number(r.sup_slack)},
              {"worst_atom_residual", number(r.worst_atom_residual)},
              {"pairing_slack", number(r.pairing_slack)},
              {"sup_bound", r.sup_bound},
              {"atoms_on_level_set", r.atoms_on_level_set},
              {"pairing", r.pairing},
              {"tol", number(r.tol)},
              {"pass", r.pass}};
}

Json to_json(const ActiveSets& s) {
  Json atoms = Json::array();
  for (const auto& a : s.atoms) {
    atoms.push_back(Json{{"x", vec(a.x)}, {"lambda", number(a.lambda)}, {"sign", a.sign},
                         {"p", number(a.p_value)}});
  }
  Json ip = Json::array(), im = Json::array();
  for (const auto& z : s.i_plus) ip.push_back(local_max(z));
  for (const auto& z : s.i_minus) im.push_back(local_max(z));
  return Json{{"support", atoms},
              {"i_plus", ip},
              {"i_minus", im},
              {"r0", number(s.r0)},
              {"sigma", number(s.sigma)},
              {"strict_complementarity", s.strict_complementarity()},
              {"act_tol", number(s.act_tol)}};
}

Json to_json(const SecondOrderReport& r) {
  Json hess = Json::array();
  for (const auto& H : r.hessians) hess.push_back(rows(H));
  return Json{{"theta", number(r.theta)},
              {"hessians", hess},
              {"soc_min_eig", number(r.soc_min_eig)},
              {"weight_block_min", number(r.weight_block_min)},
              {"gram_eigenvalues", vec(r.gram_eigenvalues)},
              {"gram_min_eig", number(r.gram_min_eig)},
              {"kernel_singular_values", vec(r.kernel_singular_values)},
              {"b1", r.b1},
              {"c1", r.c1},
              {"c3", r.c3},
              {"c4", r.c4},
              {"c3_applicable", r.c3_applicable()},
              {"c4_applicable", r.c4_applicable()},
              {"convex_loss", r.convex_loss},
              {"strongly_convex_loss", r.strongly_convex_loss},
              {"sample_relative", r.sample_relative}};
}

Json to_json(const GrowthReport& r, bool with_samples) {
  Json prof = Json::array();
  for (const auto& p : r.profile) {
    prof.push_back(Json{{"radius", number(p.radius)}, {"gamma", number(p.gamma)},
                        {"argmin", p.argmin_tag}});
  }
  Json j{{"gamma_hat", number(r.gamma_hat)},
         {"gamma_argmin", r.gamma_argmin},
         {"gamma_tol", number(r.gamma_tol)},
         {"eps", number(r.eps)},
         {"min_gap", number(r.min_gap)},
         {"decay_slope", number(r.decay_slope)},
         {"profile", prof},
         {"n_samples", r.samples.size()},
         {"skipped", r.skipped},
         {"pass", r.pass}};
  if (with_samples) {
    Json s = Json::array();
    for (const auto& x : r.samples) {
      s.push_back(Json{{"tag", x.tag},
                       {"radius", number(x.radius)},
                       {"bl_distance", number(x.bl_distance)},
                       {"gap", number(x.gap)},
                       {"ratio", number(x.ratio)}});
    }
    j["samples"] = s;
  }
  return j;
}

Json to_json(const TransportPlan& plan) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < plan.gamma.rows(); ++i) {
    for (Eigen::Index k = 0; k < plan.gamma.cols(); ++k) {
      if (plan.gamma(i, k) <= 0.0) continue;
      entries.push_back(Json{{"from", vec(plan.rows[static_cast<std::size_t>(i)].x)},
                             {"to", vec(plan.cols[static_cast<std::size_t>(k)].x)},
                             {"mass", number(plan.gamma(i, k))}});
    }
  }
  return Json{{"cost", number(plan.cost)}, {"moves", entries}};
}

}  // namespace radon

#include "radon/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <tuple>

#include "radon/errors.hpp"
#include "radon/io.hpp"

namespace radon::cli {

namespace {

struct Flags {
  std::string config;
  std::string measure;
  std::vector<std::string> measures;  // transport: one signed or two nonnegative
  std::string out = ".";
  std::optional<unsigned> seed;
  std::optional<int> grid;
  std::optional<double> tol;
  std::string stage = "growth";
};

const std::vector<std::string> kStages = {"solve", "first-order",  "active-sets", "hessian",
                                          "soc",   "second-order", "growth"};

int stage_rank(const std::string& s) {
  return static_cast<int>(std::find(kStages.begin(), kStages.end(), s) - kStages.begin());
}

/// An exception raised inside a named pipeline stage.
struct StageFailure {
  std::string stage;
  std::string type;
  std::string message;
};

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const InconsistentStationarity*>(&e)) return "InconsistentStationarity";
  if (dynamic_cast<const BoundaryAtomError*>(&e)) return "BoundaryAtomError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const SignError*>(&e)) return "SignError";
  if (dynamic_cast<const MassError*>(&e)) return "MassError";
  if (dynamic_cast<const UnsupportedDimension*>(&e)) return "UnsupportedDimension";
  if (dynamic_cast<const ConeViolation*>(&e)) return "ConeViolation";
  return "Error";
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure{stage, error_type(e), e.what()};
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

std::filesystem::path prepare_out(const Flags& flags) {
  std::filesystem::path dir(flags.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + flags.out);
  return dir;
}

void write_report(const std::filesystem::path& dir, const Json& report) {
  write_text(dir / "report.json", report.dump(2) + "\n");
}

ConfigFile load_with_overrides(const Flags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  ConfigFile cfg = load_config(flags.config);
  if (flags.grid) {
    if (*flags.grid < 16) throw ConfigError("--grid must be at least 16");
    cfg.settings.grid_n = *flags.grid;
    cfg.settings.solver.grid_n = *flags.grid;
  }
  if (flags.tol) cfg.settings.tol = *flags.tol;
  if (flags.seed) {
    cfg.settings.growth.seed = *flags.seed;
    cfg.settings.second_order.soc.seed = *flags.seed;
  }
  if (!flags.measure.empty()) {
    cfg.measure = load_measure(flags.measure, cfg.problem.domain.dim());
    for (const auto& a : cfg.measure->atoms()) {
      if (!cfg.problem.domain.contains(a.x)) {
        throw ConfigError(flags.measure + ": atom outside the domain");
      }
    }
  }
  return cfg;
}

Json header(const std::string& command, const ConfigFile& cfg) {
  return Json{{"schema_version", 1}, {"command", command}, {"scenario", cfg.name}};
}

/// Obtains the measure to certify: given or solved. Writes iterations.csv
/// when solving.
DiscreteMeasure obtain_measure(const ConfigFile& cfg, const std::filesystem::path& dir,
                               Json& report) {
  if (cfg.measure) {
    report["measure_source"] = "file";
    return *cfg.measure;
  }
  SolveResult res = in_stage("solve", [&] { return solve_gcg(cfg.problem, cfg.settings.solver); });
  std::ostringstream csv;
  write_iterations_csv(csv, res.log);
  write_text(dir / "iterations.csv", csv.str());
  report["measure_source"] = "solve";
  report["solver"] = Json{{"iterations", res.log.size()},
                          {"objective", number(res.log.back().objective)},
                          {"max_abs_p", number(res.log.back().max_abs_p)}};
  return res.u;
}

int cmd_solve(const Flags& flags, std::ostream& out) {
  const ConfigFile cfg = load_with_overrides(flags);
  const auto dir = prepare_out(flags);
  Json report = header("solve", cfg);
  SolveResult res = in_stage("solve", [&] { return solve_gcg(cfg.problem, cfg.settings.solver); });
  std::ostringstream csv;
  write_iterations_csv(csv, res.log);
  write_text(dir / "iterations.csv", csv.str());
  report["measure"] = to_json(res.u);
  report["objective"] = number(objective(cfg.problem, res.u));
  report["iterations"] = res.log.size();
  report["first_order"] = to_json(res.first_order);
  report["verdict"] = Json{{"first_order", res.first_order.pass}, {"pass", res.first_order.pass}};
  write_report(dir, report);
  write_text(dir / "measure.json", to_json(res.u).dump(2) + "\n");
  out << "solved " << cfg.name << ": " << res.u.size() << " atoms, J = " << std::setprecision(12)
      << objective(cfg.problem, res.u) << "\n";
  return res.first_order.pass ? kPass : kVerdictFail;
}

int cmd_certify(const Flags& flags, std::ostream& out) {
  const ConfigFile cfg = load_with_overrides(flags);
  int last = stage_rank(flags.stage);
  if (last >= static_cast<int>(kStages.size())) throw ConfigError("unknown --stage " + flags.stage);
  const auto dir = prepare_out(flags);
  const RunSettings& st = cfg.settings;
  const Problem& problem = cfg.problem;

  Json report = header("certify", cfg);
  report["stage"] = flags.stage;
  report["settings"] = to_json(st);
  Json verdict;
  bool pass = true;
  try {
    const DiscreteMeasure u = obtain_measure(cfg, dir, report);
    report["measure"] = to_json(u);
    report["objective"] = number(objective(problem, u));
    if (last >= stage_rank("first-order")) {
      const FirstOrderReport fo =
          in_stage("first-order", [&] { return check_first_order(problem, u, st.grid_n, st.tol); });
      report["first_order"] = to_json(fo);
      verdict["first_order"] = fo.pass;
      pass = pass && fo.pass;
      // Every later stage assumes stationarity.
      if (!fo.pass && last > stage_rank("first-order")) {
        Json skipped = Json::array();
        for (int k = stage_rank("first-order") + 1; k <= last; ++k) skipped.push_back(kStages[k]);
        report["skipped"] = skipped;
        last = stage_rank("first-order");
      }
    }
    std::optional<ActiveSets> sets;
    if (last >= stage_rank("active-sets")) {
      sets = in_stage("active-sets", [&] { return active_sets(problem, u, st.grid_n, st.act_tol); });
      report["active_sets"] = to_json(*sets);
    }
    if (last >= stage_rank("hessian") && last < stage_rank("second-order")) {
      const DualVariable dual(problem, u);
      const HessianCertificate hc = in_stage("hessian", [&] {
        return hessian_certificate(dual, *sets, problem.domain, st.second_order.theta_tol,
                                   st.second_order.boundary_tol);
      });
      report["hessian"] = Json{{"theta", number(hc.theta)}, {"pass", hc.pass}};
      verdict["hessian"] = hc.pass;
      pass = pass && hc.pass;
      if (last >= stage_rank("soc")) {
        const SocSpectrum soc =
            in_stage("soc", [&] { return soc_min_eig(problem, u, *sets, st.second_order.soc); });
        const bool ok = hc.pass && soc.min_value > st.second_order.soc_tol;
        report["soc"] = Json{{"min_value", number(soc.min_value)}, {"exact", soc.exact}};
        verdict["b1"] = ok;
        pass = pass && ok;
      }
    }
    if (last >= stage_rank("second-order")) {
      const SecondOrderReport so = in_stage(
          "second-order", [&] { return check_C_conditions(problem, u, *sets, st.second_order); });
      report["structural"] = to_json(so);
      verdict["b1"] = so.b1;
      pass = pass && so.b1;
    }
    if (last >= stage_rank("growth")) {
      const GrowthReport gr =
          in_stage("growth", [&] { return growth_check(problem, u, *sets, st.growth); });
      report["growth"] = to_json(gr);
      std::ostringstream csv;
      write_growth_csv(csv, gr);
      write_text(dir / "growth.csv", csv.str());
      verdict["b2_empirical"] = gr.pass;
      verdict["agreement"] = verdict["b1"].get<bool>() == gr.pass;
      pass = pass && gr.pass;
    }
  } catch (const StageFailure& f) {
    report["error"] = Json{{"stage", f.stage}, {"type", f.type}, {"message", f.message}};
    verdict["pass"] = false;
    report["verdict"] = verdict;
    write_report(dir, report);
    throw;
  }
  verdict["pass"] = pass;
  report["verdict"] = verdict;
  write_report(dir, report);
  out << "certify " << cfg.name << ": " << verdict.dump() << "\n";
  return pass ? kPass : kVerdictFail;
}

int cmd_growth(const Flags& flags, std::ostream& out) {
  const ConfigFile cfg = load_with_overrides(flags);
  const auto dir = prepare_out(flags);
  const RunSettings& st = cfg.settings;
  Json report = header("growth", cfg);
  try {
    const DiscreteMeasure u = obtain_measure(cfg, dir, report);
    report["measure"] = to_json(u);
    const ActiveSets sets =
        in_stage("active-sets", [&] { return active_sets(cfg.problem, u, st.grid_n, st.act_tol); });
    const GrowthReport gr =
        in_stage("growth", [&] { return growth_check(cfg.problem, u, sets, st.growth); });
    report["growth"] = to_json(gr);
    report["verdict"] = Json{{"b2_empirical", gr.pass}, {"pass", gr.pass}};
    std::ostringstream csv;
    write_growth_csv(csv, gr);
    write_text(dir / "growth.csv", csv.str());
    write_report(dir, report);
    out << "growth " << cfg.name << ": gamma_hat = " << gr.gamma_hat
        << (gr.pass ? " (pass)" : " (fail)") << "\n";
    return gr.pass ? kPass : kVerdictFail;
  } catch (const StageFailure& f) {
    report["error"] = Json{{"stage", f.stage}, {"type", f.type}, {"message", f.message}};
    write_report(dir, report);
    throw;
  }
}

int cmd_transport(const Flags& flags, std::ostream& out) {
  if (flags.measures.empty() || flags.measures.size() > 2) {
    throw ConfigError("transport needs --measure U (signed) or --measure MU --measure NU");
  }
  DiscreteMeasure mu, nu;
  if (flags.measures.size() == 1) {
    std::tie(mu, nu) = jordan_decompose(load_measure(flags.measures[0]));
  } else {
    mu = load_measure(flags.measures[0]);
    nu = load_measure(flags.measures[1], mu.dim());
  }
  Json report{{"schema_version", 1}, {"command", "transport"}};
  const FlatNormResult bl = in_stage("transport", [&] { return bl_norm_with_plan(mu - nu); });
  report["bl"] = number(bl.value);
  report["bl_plan"] = to_json(bl.plan);
  try {
    const auto [w, plan] = w1(mu, nu);
    report["w1"] = number(w);
    report["plan"] = to_json(plan);
  } catch (const Error& e) {
    report["w1"] = nullptr;
    report["plan"] = nullptr;
    report["w1_error"] = e.what();
  }
  if (flags.out != ".") write_report(prepare_out(flags), report);
  out << report.dump(2) << "\n";
  return kPass;
}

int cmd_report(const Flags& flags, std::ostream& out) {
  if (flags.config.empty()) throw ConfigError("--config must point to a report.json");
  Json r;
  try {
    r = Json::parse(read_file(flags.config));
  } catch (const Json::parse_error&) {
    throw ConfigError(flags.config + ": invalid JSON");
  }
  if (!r.is_object() || r.value("schema_version", 0) != 1) {
    throw ConfigError(flags.config + ": field 'schema_version': expected 1");
  }
  auto cell = [](const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); };
  auto row = [&](const std::string& k, const Json& v) {
    out << std::left << std::setw(28) << k << cell(v) << "\n";
  };
  out << "scenario: " << r.value("scenario", std::string("-")) << " (" << r.value("command", "")
      << ")\n";
  if (r.contains("measure")) row("atoms", r["measure"]["atoms"].size());
  if (r.contains("objective")) row("objective", r["objective"]);
  for (const char* section : {"first_order", "structural", "growth"}) {
    if (!r.contains(section)) continue;
    out << "[" << section << "]\n";
    for (const auto& [k, v] : r[section].items()) {
      if (v.is_array() || v.is_object()) continue;
      row("  " + k, v);
    }
  }
  if (r.contains("growth") && r["growth"].contains("profile")) {
    out << "[growth profile]\n";
    out << "  " << std::setw(24) << "radius" << std::setw(24) << "gamma" << "argmin\n";
    for (const auto& p : r["growth"]["profile"]) {
      out << "  " << std::setw(24) << cell(p["radius"]) << std::setw(24) << cell(p["gamma"])
          << cell(p["argmin"]) << "\n";
    }
  }
  if (r.contains("verdict")) {
    out << "[verdict]\n";
    for (const auto& [k, v] : r["verdict"].items()) row("  " + k, v);
  }
  if (r.contains("error")) out << "error in stage " << cell(r["error"]["stage"]) << ": "
                               << cell(r["error"]["message"]) << "\n";
  if (flags.out != "." && r.contains("growth") && r["growth"].contains("samples")) {
    const auto dir = prepare_out(flags);
    std::ostringstream csv;
    csv << "tag,radius,bl_distance,gap,ratio\n";
    for (const auto& s : r["growth"]["samples"]) {
      csv << cell(s["tag"]) << ',' << cell(s["radius"]) << ',' << cell(s["bl_distance"]) << ','
          << cell(s["gap"]) << ',' << cell(s["ratio"]) << "\n";
    }
    write_text(dir / "growth.csv", csv.str());
  }
  return kPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse measure optimization with second-order certificates", "radon_cert"};
  app.require_subcommand(1, 1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "problem / scenario JSON (report: a report.json)");
    sub->add_option("--measure", flags.measure, "measure JSON, skips the solver");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "seed for sampled perturbations");
    sub->add_option("--grid", flags.grid, "grid resolution per axis for dual scans");
    sub->add_option("--tol", flags.tol, "first-order tolerance");
    sub->add_option("--stage", flags.stage, "last certify stage")
        ->check(CLI::IsMember(kStages));
  };
  CLI::App* solve = app.add_subcommand("solve", "solve the problem by conditional gradient");
  CLI::App* certify = app.add_subcommand("certify", "first- and second-order certification");
  CLI::App* growth = app.add_subcommand("growth", "empirical quadratic growth check");
  CLI::App* transport = app.add_subcommand("transport", "BL norm and W1 of a signed measure");
  CLI::App* report = app.add_subcommand("report", "render a report.json");
  for (auto* sub : {solve, certify, growth, report}) add_common(sub);
  transport->add_option("--measure", flags.measures, "signed measure, or MU then NU")
      ->expected(1, 2)
      ->allow_extra_args(false);
  transport->add_option("--out", flags.out, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kConfigError;
  }
  try {
    if (solve->parsed()) return cmd_solve(flags, out);
    if (certify->parsed()) return cmd_certify(flags, out);
    if (growth->parsed()) return cmd_growth(flags, out);
    if (transport->parsed()) return cmd_transport(flags, out);
    return cmd_report(flags, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const StageFailure& f) {
    err << "stage " << f.stage << " failed (" << f.type << "): " << f.message << "\n";
    return kStageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace radon::cli

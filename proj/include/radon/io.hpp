#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "radon/growth.hpp"
#include "radon/scenarios.hpp"
#include "radon/second_order.hpp"
#include "radon/solver.hpp"
#include "radon/transport.hpp"

namespace radon {

using Json = nlohmann::ordered_json;

/// Pipeline settings that can be stored in a scenario file.
struct RunSettings {
  int grid_n = 256;              // dual scans in the certification stages
  double tol = 1e-6;             // first-order tolerance
  double act_tol = kDefaultActTol;
  SolverConfig solver;
  GrowthConfig growth;
  SecondOrderOptions second_order;
};

/// Contents of a scenario / problem file.
struct ConfigFile {
  std::string name;
  std::string description;
  Problem problem;
  std::optional<DiscreteMeasure> measure;
  RunSettings settings;
};

/// Parses a JSON problem file. Throws ConfigError naming the line (syntax
/// errors) or the field path (schema errors), prefixed by `source`. Loss data
/// given as a string is a CSV path relative to the directory of `source`.
ConfigFile parse_config(const std::string& text, const std::string& source = "<config>");
ConfigFile load_config(const std::string& path);

/// Measure file {"atoms": [{"x": [...], "w": ...}, ...]}; `dim` = 0 infers
/// the dimension from the first atom.
DiscreteMeasure parse_measure(const Json& j, const std::string& where, int dim = 0);
DiscreteMeasure load_measure(const std::string& path, int dim = 0);

Json to_json(const DiscreteMeasure& u);
Json to_json(const Problem& problem);
Json to_json(const RunSettings& settings);
Json to_json(const Scenario& scenario, const RunSettings& settings = {});

Json to_json(const FirstOrderReport& r);
Json to_json(const ActiveSets& s);
Json to_json(const SecondOrderReport& r);
Json to_json(const GrowthReport& r, bool with_samples = true);
Json to_json(const TransportPlan& plan);

/// Finite doubles as numbers, infinities as the strings "inf" / "-inf",
/// NaN as null.
Json number(double v);

std::string read_file(const std::string& path);

}  // namespace radon

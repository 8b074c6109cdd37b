#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace binormal::cli {

using Json = nlohmann::ordered_json;
using Coords = std::vector<double>;

/// Raised for malformed configs and flags (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasureLiteral {
  double weight = 1.0;
  std::string kind;  // atom | harmonic
  Coords location;   // atom
  Coords center;     // harmonic
  double radius = 1.0;
  Coords base;
};

struct Scenario {
  std::string name;
  std::string kind;
  int dim = 3;

  // Geometry of two-sphere style scenarios.
  std::optional<Coords> center;
  std::optional<Coords> x;
  double r1 = 1.0;
  double r2 = 2.0;
  std::string variant = "binormal";
  std::vector<Coords> points;

  // superposed
  std::vector<Coords> atoms;
  std::vector<double> weights;

  // generators
  int m = 64;
  std::string test = "poly";

  // measure literal scenarios
  std::vector<MeasureLiteral> measure;
  std::optional<Coords> support_center;
  std::optional<double> support_radius;
  std::string verifier = "pure-binormal";

  // choquet-deny
  std::string kernel = "ball-green";

  std::optional<double> tolerance;
  int quad_order = 0;

  // walk-on-spheres
  std::string domain = "ball";
  std::optional<double> radius;
  std::optional<Coords> lower;
  std::optional<Coords> upper;
  std::string g = "poly:z1^2";
  std::string f1;
  std::string f2;
  std::size_t samples = 0;
  double eps = 1e-4;
  std::uint64_t seed = 0;
  int depth_cap = 12;
  double ratio = 0.5;
  unsigned threads = 0;
  int nested_budget = 8;
  int max_steps = 10000;
};

struct ScenarioResult {
  Json json;
  bool pass = true;
};

/// Scenario kinds accepted by execute().
const std::vector<std::string>& scenario_kinds();

/// Runs one scenario. Library errors propagate.
ScenarioResult execute(const Scenario& s);

/// JSON echo of the fields relevant to the scenario kind.
Json echo(const Scenario& s);

/// Parses a YAML config into scenarios. Unknown keys raise ConfigError naming
/// the key.
struct Config {
  std::vector<Scenario> scenarios;
};
Config load_config(const std::string& path);

Coords parse_coords(const std::string& text);
std::vector<Coords> parse_coord_list(const std::string& text);

}  // namespace binormal::cli

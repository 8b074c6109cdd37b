#include <algorithm>
#include <map>
#include <set>

#include <yaml-cpp/yaml.h>

#include "scenario.hpp"

namespace binormal::cli {

namespace {

const std::set<std::string> kCommonKeys{"name", "kind", "dim", "tolerance", "quad_order", "seed"};
const std::set<std::string> kWosKeys{"domain", "center", "radius", "lower", "upper", "x", "samples", "eps", "threads",
                                     "max_steps"};

std::set<std::string> allowed_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> by_kind{
      {"two-sphere", {"center", "x", "r1", "r2", "variant", "points"}},
      {"superposed", {"atoms", "weights", "r1", "r2", "points"}},
      {"choquet-deny", {"center", "radius", "x", "kernel", "points"}},
      {"sweep", {"center", "x", "r1", "r2", "variant", "points"}},
      {"generators", {"center", "x", "r1", "r2", "m", "test"}},
      {"normal", {"center", "x", "r1", "points"}},
      {"measure", {"measure", "support", "verifier", "points"}},
      {"wos-laplace", {"g"}},
      {"wos-riquier", {"f1", "f2", "nested_budget"}},
      {"two-sphere-walk", {"f1", "ratio", "depth_cap"}},
  };
  const auto it = by_kind.find(kind);
  if (it == by_kind.end()) return {};
  std::set<std::string> keys = it->second;
  keys.insert(kCommonKeys.begin(), kCommonKeys.end());
  if (kind.starts_with("wos-") || kind == "two-sphere-walk") keys.insert(kWosKeys.begin(), kWosKeys.end());
  return keys;
}

template <class T>
T read(const YAML::Node& node, const std::string& context) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(context + ": value has the wrong type");
  }
}

Coords read_coords(const YAML::Node& node, const std::string& context) {
  if (!node.IsSequence()) throw ConfigError(context + ": expected a list of numbers");
  Coords c;
  for (std::size_t i = 0; i < node.size(); ++i) c.push_back(read<double>(node[i], context));
  return c;
}

std::vector<Coords> read_coord_list(const YAML::Node& node, const std::string& context) {
  if (!node.IsSequence()) throw ConfigError(context + ": expected a list of points");
  std::vector<Coords> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(read_coords(node[i], context + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& context) {
  if (!node.IsMap()) throw ConfigError(context + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(context + ": unknown field '" + key + "'");
  }
}

MeasureLiteral read_literal(const YAML::Node& node, const std::string& context) {
  check_keys(node, {"weight", "kind", "location", "center", "radius", "base"}, context);
  MeasureLiteral m;
  if (!node["kind"]) throw ConfigError(context + ": missing field 'kind'");
  m.kind = read<std::string>(node["kind"], context + ".kind");
  if (node["weight"]) m.weight = read<double>(node["weight"], context + ".weight");
  if (m.kind == "atom") {
    for (const char* k : {"center", "radius", "base"}) {
      if (node[k]) throw ConfigError(context + ": field '" + k + "' does not apply to atoms");
    }
    if (!node["location"]) throw ConfigError(context + ": atoms need 'location'");
    m.location = read_coords(node["location"], context + ".location");
  } else if (m.kind == "harmonic") {
    if (node["location"]) throw ConfigError(context + ": field 'location' does not apply to harmonic measures");
    if (!node["center"] || !node["radius"]) throw ConfigError(context + ": harmonic measures need 'center' and 'radius'");
    m.center = read_coords(node["center"], context + ".center");
    m.radius = read<double>(node["radius"], context + ".radius");
    if (node["base"]) m.base = read_coords(node["base"], context + ".base");
  } else {
    throw ConfigError(context + ".kind: expected 'atom' or 'harmonic', got '" + m.kind + "'");
  }
  return m;
}

Scenario read_scenario(const YAML::Node& node, std::size_t index, std::uint64_t seed, int quad_order) {
  const std::string context = "scenarios[" + std::to_string(index) + "]";
  if (!node.IsMap()) throw ConfigError(context + ": expected a mapping");
  if (!node["kind"]) throw ConfigError(context + ": missing field 'kind'");
  Scenario s;
  s.kind = read<std::string>(node["kind"], context + ".kind");
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
    throw ConfigError(context + ".kind: unknown scenario kind '" + s.kind + "'");
  }
  check_keys(node, allowed_keys(s.kind), context + " (" + s.kind + ")");
  s.name = node["name"] ? read<std::string>(node["name"], context + ".name") : s.kind + "-" + std::to_string(index);
  s.seed = seed;
  s.quad_order = quad_order;
  if (s.kind.starts_with("wos-") || s.kind == "two-sphere-walk") s.dim = 2;

  const auto get = [&](const char* key) { return node[key]; };
  const auto ctx = [&](const char* key) { return context + "." + key; };
  if (auto n = get("dim")) s.dim = read<int>(n, ctx("dim"));
  if (auto n = get("tolerance")) s.tolerance = read<double>(n, ctx("tolerance"));
  if (auto n = get("quad_order")) s.quad_order = read<int>(n, ctx("quad_order"));
  if (auto n = get("seed")) s.seed = read<std::uint64_t>(n, ctx("seed"));
  if (auto n = get("center")) s.center = read_coords(n, ctx("center"));
  if (auto n = get("x")) s.x = read_coords(n, ctx("x"));
  if (auto n = get("r1")) s.r1 = read<double>(n, ctx("r1"));
  if (auto n = get("r2")) s.r2 = read<double>(n, ctx("r2"));
  if (auto n = get("variant")) s.variant = read<std::string>(n, ctx("variant"));
  if (auto n = get("points")) s.points = read_coord_list(n, ctx("points"));
  if (auto n = get("atoms")) s.atoms = read_coord_list(n, ctx("atoms"));
  if (auto n = get("weights")) s.weights = read_coords(n, ctx("weights"));
  if (auto n = get("m")) s.m = read<int>(n, ctx("m"));
  if (auto n = get("test")) s.test = read<std::string>(n, ctx("test"));
  if (auto n = get("kernel")) s.kernel = read<std::string>(n, ctx("kernel"));
  if (auto n = get("verifier")) s.verifier = read<std::string>(n, ctx("verifier"));
  if (auto n = get("measure")) {
    if (!n.IsSequence()) throw ConfigError(ctx("measure") + ": expected a list");
    for (std::size_t i = 0; i < n.size(); ++i) {
      s.measure.push_back(read_literal(n[i], ctx("measure") + "[" + std::to_string(i) + "]"));
    }
  }
  if (auto n = get("support")) {
    check_keys(n, {"center", "radius"}, ctx("support"));
    if (n["center"]) s.support_center = read_coords(n["center"], ctx("support") + ".center");
    if (n["radius"]) s.support_radius = read<double>(n["radius"], ctx("support") + ".radius");
  }
  if (auto n = get("domain")) s.domain = read<std::string>(n, ctx("domain"));
  if (auto n = get("radius")) s.radius = read<double>(n, ctx("radius"));
  if (auto n = get("lower")) s.lower = read_coords(n, ctx("lower"));
  if (auto n = get("upper")) s.upper = read_coords(n, ctx("upper"));
  if (auto n = get("g")) s.g = read<std::string>(n, ctx("g"));
  if (auto n = get("f1")) s.f1 = read<std::string>(n, ctx("f1"));
  if (auto n = get("f2")) s.f2 = read<std::string>(n, ctx("f2"));
  if (auto n = get("samples")) s.samples = read<std::size_t>(n, ctx("samples"));
  if (auto n = get("eps")) s.eps = read<double>(n, ctx("eps"));
  if (auto n = get("depth_cap")) s.depth_cap = read<int>(n, ctx("depth_cap"));
  if (auto n = get("ratio")) s.ratio = read<double>(n, ctx("ratio"));
  if (auto n = get("threads")) s.threads = read<unsigned>(n, ctx("threads"));
  if (auto n = get("nested_budget")) s.nested_budget = read<int>(n, ctx("nested_budget"));
  if (auto n = get("max_steps")) s.max_steps = read<int>(n, ctx("max_steps"));
  return s;
}

}  // namespace

Config load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  check_keys(root, {"version", "seed", "quad_order", "scenarios"}, "config");
  if (root["version"] && read<int>(root["version"], "version") != 1) throw ConfigError("config: version must be 1");
  const std::uint64_t seed = root["seed"] ? read<std::uint64_t>(root["seed"], "seed") : 0;
  const int quad_order = root["quad_order"] ? read<int>(root["quad_order"], "quad_order") : 0;
  const YAML::Node list = root["scenarios"];
  if (!list || !list.IsSequence() || list.size() == 0) throw ConfigError("config: 'scenarios' must be a non-empty list");
  Config cfg;
  for (std::size_t i = 0; i < list.size(); ++i) cfg.scenarios.push_back(read_scenario(list[i], i, seed, quad_order));
  return cfg;
}

}  // namespace binormal::cli

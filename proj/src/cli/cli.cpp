#include "binormal/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <memory>
#include <ostream>

#include "CLI11.hpp"
#include "binormal/errors.hpp"
#include "binormal/funczoo.hpp"
#include "binormal/kernels.hpp"
#include "scenario.hpp"

#ifndef BINORMAL_VERSION
#define BINORMAL_VERSION "unknown"
#endif

namespace binormal::cli {

namespace {

enum class Status { kPass = 0, kFail = 2, kSingular = 3, kError = 1 };

int severity(Status s) {
  switch (s) {
    case Status::kPass:
      return 0;
    case Status::kFail:
      return 1;
    case Status::kSingular:
      return 2;
    case Status::kError:
      return 3;
  }
  return 3;
}

struct Globals {
  std::string out_path;
  bool no_timestamp = false;
  int quad_order = 0;
  bool parallel = false;
};

// Flags shared by the verify and solve subcommands; each subcommand owns one.
struct Flags {
  int dim = 3;
  std::string center, x, points, atoms, weights, lower, upper;
  double r1 = 1.0, r2 = 2.0;
  std::optional<double> radius, tolerance;
  std::string variant = "binormal";
  int m = 64;
  std::string test = "poly";
  std::string kernel = "ball-green";
  std::string domain = "ball";
  std::string g = "poly:z1^2", f1, f2;
  std::size_t samples = 0;
  double eps = 1e-4;
  std::uint64_t seed = 0;
  int depth_cap = 12;
  double ratio = 0.5;
  unsigned threads = 0;
  int nested_budget = 8;
  int max_steps = 10000;
};

Scenario to_scenario(const std::string& kind, const Flags& f, const Globals& g) {
  Scenario s;
  s.name = kind;
  s.kind = kind;
  s.dim = f.dim;
  if (!f.center.empty()) s.center = parse_coords(f.center);
  if (!f.x.empty()) s.x = parse_coords(f.x);
  if (!f.points.empty()) s.points = parse_coord_list(f.points);
  if (!f.atoms.empty()) s.atoms = parse_coord_list(f.atoms);
  if (!f.weights.empty()) s.weights = parse_coords(f.weights);
  if (!f.lower.empty()) s.lower = parse_coords(f.lower);
  if (!f.upper.empty()) s.upper = parse_coords(f.upper);
  s.r1 = f.r1;
  s.r2 = f.r2;
  s.radius = f.radius;
  s.tolerance = f.tolerance;
  s.variant = f.variant;
  s.m = f.m;
  s.test = f.test;
  s.kernel = f.kernel;
  s.domain = f.domain;
  s.g = f.g;
  s.f1 = f.f1;
  s.f2 = f.f2;
  s.samples = f.samples;
  s.eps = f.eps;
  s.seed = f.seed;
  s.depth_cap = f.depth_cap;
  s.ratio = f.ratio;
  s.threads = f.threads;
  s.nested_budget = f.nested_budget;
  s.max_steps = f.max_steps;
  s.quad_order = g.quad_order;
  return s;
}

void add_two_sphere_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--dim", f.dim, "Dimension n (2 or 3)")->capture_default_str();
  sub->add_option("--center", f.center, "Common center, comma separated (default origin)");
  sub->add_option("--r1", f.r1, "Inner radius")->capture_default_str();
  sub->add_option("--r2", f.r2, "Outer radius")->capture_default_str();
  sub->add_option("--x", f.x, "Base point x (default center)");
  sub->add_option("--tolerance", f.tolerance, "Residual tolerance");
}

void add_points_flag(CLI::App* sub, Flags& f) {
  sub->add_option("--points", f.points, "Extra points 'a,b,c;d,e,f' (replace the canonical probe)");
}

void add_wos_flags(CLI::App* sub, Flags& f) {
  f.dim = 2;
  sub->add_option("--dim", f.dim, "Dimension n (2 or 3)")->capture_default_str();
  sub->add_option("--domain", f.domain, "ball or box")->capture_default_str();
  sub->add_option("--center", f.center, "Ball center (default origin)");
  sub->add_option("--radius", f.radius, "Ball radius (default 1)");
  sub->add_option("--lower", f.lower, "Box lower corner");
  sub->add_option("--upper", f.upper, "Box upper corner");
  sub->add_option("--point,--x", f.x, "Start point (default domain center)");
  sub->add_option("--samples", f.samples, "Number of walks");
  sub->add_option("--eps", f.eps, "Absorption shell width")->capture_default_str();
  sub->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--max-steps", f.max_steps, "Step cap per walk")->capture_default_str();
}

struct Outcome {
  Json json;
  Status status = Status::kPass;
};

Outcome run_one(const Scenario& s, std::size_t index) {
  Outcome o;
  o.json = Json{{"index", index}, {"name", s.name}, {"kind", s.kind}};
  try {
    o.json["echo"] = echo(s);
    ScenarioResult r = execute(s);
    o.status = r.pass ? Status::kPass : Status::kFail;
    o.json["pass"] = r.pass;
    for (auto& [k, v] : r.json.items()) o.json[k] = v;
  } catch (const SingularityError& e) {
    o.status = Status::kSingular;
    o.json["pass"] = false;
    o.json["error"] = {{"type", "singularity"}, {"message", e.what()}};
  } catch (const ConfigError& e) {
    o.status = Status::kError;
    o.json["pass"] = false;
    o.json["error"] = {{"type", "config"}, {"message", e.what()}};
  } catch (const Error& e) {
    o.status = Status::kError;
    o.json["pass"] = false;
    o.json["error"] = {{"type", "domain"}, {"message", e.what()}};
  }
  return o;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes text to --out or the output stream; false on I/O failure.
bool write_text(const std::string& text, const Globals& g, std::ostream& out, std::ostream& err) {
  if (g.out_path.empty()) {
    out << text;
    return static_cast<bool>(out);
  }
  std::ofstream f(g.out_path, std::ios::binary);
  f << text;
  if (!f) {
    err << "error: cannot write " << g.out_path << "\n";
    return false;
  }
  return true;
}

int run_envelope(const std::string& command, const std::vector<Scenario>& scenarios, const Globals& g,
                 std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Outcome> outcomes(scenarios.size());
  if (g.parallel && scenarios.size() > 1) {
    std::vector<std::future<Outcome>> jobs;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, [&scenarios, i] { return run_one(scenarios[i], i); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) outcomes[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < scenarios.size(); ++i) outcomes[i] = run_one(scenarios[i], i);
  }

  Status worst = Status::kPass;
  std::size_t passed = 0;
  Json list = Json::array();
  for (Outcome& o : outcomes) {
    if (severity(o.status) > severity(worst)) worst = o.status;
    if (o.status == Status::kPass) ++passed;
    if (o.json.contains("error")) err << "error: " << o.json["error"]["message"].get<std::string>() << "\n";
    list.push_back(std::move(o.json));
  }
  Json env;
  env["tool"] = "binormal";
  env["version"] = BINORMAL_VERSION;
  env["command"] = command;
  env["pass"] = worst == Status::kPass;
  env["summary"] = {{"scenarios", scenarios.size()}, {"passed", passed}};
  env["scenarios"] = std::move(list);
  if (!g.no_timestamp) {
    env["timestamp"] = utc_timestamp();
    env["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (!write_text(env.dump(2) + "\n", g, out, err)) return 1;
  return static_cast<int>(worst);
}

std::string format17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct GridFlags {
  std::string kernel = "newtonian";
  int dim = 3;
  std::string source, ball_center, points, lower, upper, counts;
  double ball_radius = 1.0;
};

std::vector<Point> grid_points(const GridFlags& f) {
  std::vector<Point> out;
  const auto as_point = [&](const Coords& c, const std::string& what) {
    if (static_cast<int>(c.size()) != f.dim) {
      throw ConfigError(what + " has " + std::to_string(c.size()) + " coordinates but dim = " + std::to_string(f.dim));
    }
    return Point::from_span(c);
  };
  if (!f.points.empty()) {
    for (const Coords& c : parse_coord_list(f.points)) out.push_back(as_point(c, "grid point"));
  } else {
    if (f.lower.empty() || f.upper.empty() || f.counts.empty()) {
      throw ConfigError("export grid needs --points or all of --lower, --upper, --counts");
    }
    const Point lo = as_point(parse_coords(f.lower), "--lower");
    const Point hi = as_point(parse_coords(f.upper), "--upper");
    const Coords counts = parse_coords(f.counts);
    if (static_cast<int>(counts.size()) != f.dim) throw ConfigError("--counts needs one entry per dimension");
    std::vector<int> cnt;
    std::size_t total = 1;
    for (double c : counts) {
      if (c < 1 || c != std::floor(c) || c > 100000) throw ConfigError("--counts entries must be positive integers");
      cnt.push_back(static_cast<int>(c));
      total *= static_cast<std::size_t>(c);
    }
    if (total > 10000000) throw ConfigError("grid has more than 1e7 points");
    std::vector<int> idx(static_cast<std::size_t>(f.dim), 0);
    for (std::size_t k = 0; k < total; ++k) {
      Point p(f.dim);
      for (int d = 0; d < f.dim; ++d) {
        const int nd = cnt[static_cast<std::size_t>(d)];
        const double t = nd == 1 ? 0.0 : static_cast<double>(idx[static_cast<std::size_t>(d)]) / (nd - 1);
        p[d] = lo[d] + t * (hi[d] - lo[d]);
      }
      out.push_back(p);
      for (int d = f.dim - 1; d >= 0; --d) {
        if (++idx[static_cast<std::size_t>(d)] < cnt[static_cast<std::size_t>(d)]) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
    return std::lexicographical_compare(a.coords().begin(), a.coords().end(), b.coords().begin(), b.coords().end());
  });
  return out;
}

int run_export_grid(const GridFlags& f, const Globals& g, std::ostream& out, std::ostream& err) {
  KernelId id;
  const Point ball_c = f.ball_center.empty() ? Point(f.dim) : Point::from_span(parse_coords(f.ball_center));
  if (f.kernel == "newtonian") {
    id = KernelId::newtonian(f.dim);
  } else if (f.kernel == "biharm") {
    id = KernelId::biharm_fundamental(f.dim);
  } else if (f.kernel == "riesz") {
    id = KernelId::riesz_iterated(f.dim);
  } else if (f.kernel == "ball-green") {
    id = KernelId::ball_green(Ball(ball_c, f.ball_radius));
  } else if (f.kernel == "iterated-ball-green") {
    id = KernelId::iterated_ball_green(Ball(ball_c, f.ball_radius));
  } else {
    throw ConfigError("unknown kernel '" + f.kernel + "'");
  }
  id.validate();
  const Point source = f.source.empty() ? Point(f.dim) : Point::from_span(parse_coords(f.source));
  if (source.dim() != f.dim) throw ConfigError("--source has the wrong number of coordinates");
  const std::vector<Point> points = grid_points(f);
  const int quad = g.quad_order > 0 ? g.quad_order : 48;

  std::string csv;
  for (int d = 0; d < f.dim; ++d) csv += "x" + std::to_string(d + 1) + ",";
  csv += "value\n";
  bool singular = false;
  for (const Point& p : points) {
    double v;
    try {
      v = evaluate(id, p, source, quad);
      if (!std::isfinite(v)) throw SingularityError("non-finite kernel value");
    } catch (const SingularityError&) {
      v = std::nan("");
      singular = true;
    }
    for (int d = 0; d < f.dim; ++d) csv += format17(p[d]) + ",";
    csv += format17(v) + "\n";
  }
  if (!write_text(csv, g, out, err)) return 1;
  if (singular) {
    err << "warning: grid contains singular points (nan rows)\n";
    return 3;
  }
  return 0;
}

int run_zoo_list(int dim, int max_degree, const Globals& g, std::ostream& out, std::ostream& err) {
  Json members = Json::array();
  for (const ZooMember& m : zoo_list(dim, max_degree)) {
    members.push_back(Json{{"name", m.name}, {"u1", m.u1.to_string()}, {"u2", m.u2.to_string()}, {"is_pair", m.is_pair}});
  }
  Json j{{"tool", "binormal"}, {"version", BINORMAL_VERSION}, {"dim", dim}, {"max_degree", max_degree},
         {"members", std::move(members)}};
  return write_text(j.dump(2) + "\n", g, out, err) ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binormal measures, biharmonic mean values and walk-on-spheres solvers.", "binormal"};
  app.set_version_flag("--version", BINORMAL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--out", g.out_path, "Write the report to this file instead of stdout");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit timestamp and wall-clock fields");
  app.add_option("--quad-order", g.quad_order, "Quadrature order (default: automatic)")->check(CLI::PositiveNumber);
  app.add_flag("--parallel", g.parallel, "Run independent scenarios concurrently");

  std::vector<std::unique_ptr<Flags>> store;
  std::vector<std::pair<CLI::App*, std::string>> scenario_commands;
  const auto flags_for = [&](CLI::App* sub, const std::string& kind) -> Flags& {
    store.push_back(std::make_unique<Flags>());
    scenario_commands.emplace_back(sub, kind);
    return *store.back();
  };

  CLI::App* verify = app.add_subcommand("verify", "Run a verifier and print a JSON report");
  verify->require_subcommand(1);
  {
    CLI::App* sub = verify->add_subcommand("two-sphere", "Potential criterion for the two-sphere measure");
    Flags& f = flags_for(sub, "two-sphere");
    add_two_sphere_flags(sub, f);
    add_points_flag(sub, f);
    sub->add_option("--variant", f.variant, "binormal or normal (eps_x - mu_x on the r1 ball)")
        ->capture_default_str();
  }
  {
    CLI::App* sub = verify->add_subcommand("superposed", "Potential criterion for a superposition over atoms");
    Flags& f = flags_for(sub, "superposed");
    sub->add_option("--dim", f.dim, "Dimension n")->capture_default_str();
    sub->add_option("--atoms", f.atoms, "Atoms 'a,b,c;d,e,f'")->required();
    sub->add_option("--weights", f.weights, "Atom weights (default 1)");
    sub->add_option("--r1", f.r1, "Inner radius about each atom")->capture_default_str();
    sub->add_option("--r2", f.r2, "Outer radius about each atom")->capture_default_str();
    sub->add_option("--tolerance", f.tolerance, "Residual tolerance");
    add_points_flag(sub, f);
  }
  {
    CLI::App* sub = verify->add_subcommand("choquet-deny", "Volume measure U^lambda d tau and its Fubini identity");
    Flags& f = flags_for(sub, "choquet-deny");
    sub->add_option("--dim", f.dim, "Dimension n")->capture_default_str();
    sub->add_option("--center", f.center, "Center of E");
    sub->add_option("--radius", f.radius, "Radius of E (default 1)");
    sub->add_option("--x", f.x, "Atom of lambda = eps_x - mu^E_x (default center)");
    sub->add_option("--kernel", f.kernel, "Density kernel: newtonian or ball-green")->capture_default_str();
    sub->add_option("--tolerance", f.tolerance, "Residual tolerance (default 1e-6)");
    add_points_flag(sub, f);
  }
  {
    CLI::App* sub = verify->add_subcommand("sweep", "Harmonic sweep of the interior part onto the outer sphere");
    Flags& f = flags_for(sub, "sweep");
    add_two_sphere_flags(sub, f);
    sub->add_option("--variant", f.variant, "binormal or normal")->capture_default_str();
  }
  {
    CLI::App* sub = verify->add_subcommand("generators", "Expansion over generators eps_z - mu_z");
    Flags& f = flags_for(sub, "generators");
    f.dim = 2;
    add_two_sphere_flags(sub, f);
    sub->add_option("--m", f.m, "Atom count")->capture_default_str();
    sub->add_option("--test", f.test, "poly or exp")->capture_default_str();
  }
  {
    CLI::App* sub = verify->add_subcommand("normal", "Newtonian potential criterion for eps_x - mu_x");
    Flags& f = flags_for(sub, "normal");
    sub->add_option("--dim", f.dim, "Dimension n")->capture_default_str();
    sub->add_option("--center", f.center, "Ball center");
    sub->add_option("--r,--r1", f.r1, "Ball radius")->capture_default_str();
    sub->add_option("--x", f.x, "Base point (default center)");
    sub->add_option("--tolerance", f.tolerance, "Residual tolerance");
    add_points_flag(sub, f);
  }

  CLI::App* solve = app.add_subcommand("solve", "Walk-on-spheres estimators");
  solve->require_subcommand(1);
  {
    CLI::App* sub = solve->add_subcommand("wos-laplace", "Dirichlet problem for the Laplacian");
    Flags& f = flags_for(sub, "wos-laplace");
    add_wos_flags(sub, f);
    sub->add_option("--g", f.g, "Boundary data (zoo name)")->capture_default_str();
  }
  {
    CLI::App* sub = solve->add_subcommand("wos-riquier", "Riquier problem Delta u1 = -u2, Delta u2 = 0");
    Flags& f = flags_for(sub, "wos-riquier");
    add_wos_flags(sub, f);
    sub->add_option("--f1", f.f1, "u1 boundary data (zoo name, default poly:z1^2)");
    sub->add_option("--f2", f.f2, "u2 boundary data (default: -Laplacian of f1)");
    sub->add_option("--nested-budget", f.nested_budget, "Nested u2 walks per step")->capture_default_str();
  }
  {
    CLI::App* sub = solve->add_subcommand("two-sphere-walk", "Experimental signed branching estimator");
    Flags& f = flags_for(sub, "two-sphere-walk");
    add_wos_flags(sub, f);
    sub->add_option("--f1", f.f1, "Boundary data (zoo name, default poly:z1^2)");
    sub->add_option("--ratio", f.ratio, "Inner to outer radius ratio")->capture_default_str();
    sub->add_option("--depth-cap", f.depth_cap, "Branching depth cap")->capture_default_str();
  }

  GridFlags grid;
  CLI::App* exp = app.add_subcommand("export", "Export kernel values");
  exp->require_subcommand(1);
  CLI::App* exp_grid = exp->add_subcommand("grid", "Kernel values K(x, source) on a grid as CSV");
  exp_grid->add_option("--kernel", grid.kernel, "newtonian, ball-green, biharm, riesz, iterated-ball-green")
      ->capture_default_str();
  exp_grid->add_option("--dim", grid.dim, "Dimension n")->capture_default_str();
  exp_grid->add_option("--source", grid.source, "Second kernel argument (default origin)");
  exp_grid->add_option("--ball-center", grid.ball_center, "Ball center for ball kernels");
  exp_grid->add_option("--ball-radius", grid.ball_radius, "Ball radius for ball kernels")->capture_default_str();
  exp_grid->add_option("--points", grid.points, "Explicit points 'a,b,c;d,e,f'");
  exp_grid->add_option("--lower", grid.lower, "Tensor grid lower corner");
  exp_grid->add_option("--upper", grid.upper, "Tensor grid upper corner");
  exp_grid->add_option("--counts", grid.counts, "Tensor grid points per axis");

  int zoo_dim = 2;
  int zoo_degree = 4;
  CLI::App* zoo = app.add_subcommand("zoo", "Test-function zoo");
  zoo->require_subcommand(1);
  CLI::App* zoo_list_cmd = zoo->add_subcommand("list", "List named members");
  zoo_list_cmd->add_option("--dim", zoo_dim, "Dimension n")->capture_default_str();
  zoo_list_cmd->add_option("--max-degree", zoo_degree, "Largest harmonic degree")->capture_default_str();

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run every scenario of a YAML config");
  run->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      Config cfg = load_config(config_path);
      if (g.quad_order > 0) {
        for (Scenario& s : cfg.scenarios) s.quad_order = g.quad_order;
      }
      return run_envelope("run " + config_path, cfg.scenarios, g, out, err);
    }
    if (exp_grid->parsed()) return run_export_grid(grid, g, out, err);
    if (zoo_list_cmd->parsed()) return run_zoo_list(zoo_dim, zoo_degree, g, out, err);
    for (std::size_t i = 0; i < scenario_commands.size(); ++i) {
      const auto& [sub, kind] = scenario_commands[i];
      if (!sub->parsed()) continue;
      const std::string command = sub->get_parent()->get_name() + " " + kind;
      return run_envelope(command, {to_scenario(kind, *store[i], g)}, g, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command given\n";
  return 1;
}

}  // namespace binormal::cli

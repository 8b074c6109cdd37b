#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "binormal/binormal.hpp"
#include "binormal/errors.hpp"
#include "binormal/funczoo.hpp"
#include "binormal/report.hpp"
#include "binormal/wos.hpp"

namespace binormal::cli {

namespace {

std::string where(const Scenario& s) { return "scenario '" + s.name + "'"; }

Point to_point(const Scenario& s, const Coords& c, const std::string& field) {
  if (static_cast<int>(c.size()) != s.dim) {
    throw ConfigError(where(s) + ": " + field + " has " + std::to_string(c.size()) + " coordinates but dim = " +
                      std::to_string(s.dim));
  }
  return Point::from_span(c);
}

Point center_of(const Scenario& s) { return s.center ? to_point(s, *s.center, "center") : Point(s.dim); }
Point x_of(const Scenario& s) { return s.x ? to_point(s, *s.x, "x") : center_of(s); }

std::vector<Point> extra_points(const Scenario& s) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < s.points.size(); ++i) out.push_back(to_point(s, s.points[i], "points[" + std::to_string(i) + "]"));
  return out;
}

int quad_order_of(const Scenario& s) {
  if (s.quad_order > 0) return s.quad_order;
  if (const char* env = std::getenv("BINORMAL_QUAD_ORDER")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("BINORMAL_QUAD_ORDER must be a positive integer");
    return static_cast<int>(v);
  }
  return 0;
}

double tolerance_of(const Scenario& s, double fallback) { return s.tolerance.value_or(fallback); }

// Canonical probe: center + 3 e1 when outside K, else 1.5 K radii out.
Point canonical_probe(const CompactSupport& K) {
  const Point c = K.ball.center();
  const Point p = c + axis_point(c.dim(), 0, 3.0);
  if (K.strictly_outside(p)) return p;
  return c + axis_point(c.dim(), 0, 1.5 * K.ball.radius());
}

std::vector<Point> grid_for(const Scenario& s, const CompactSupport& K, bool add_probe) {
  std::vector<Point> grid = default_exterior_grid(K);
  const std::vector<Point> extra = extra_points(s);
  if (extra.empty() && add_probe) {
    grid.push_back(canonical_probe(K));
  } else {
    grid.insert(grid.end(), extra.begin(), extra.end());
  }
  return grid;
}

Json probe_json(const VerificationReport& r) {
  // The last grid point is the probe or the last user point.
  Json j = Json::object();
  for (auto it = r.residuals.rbegin(); it != r.residuals.rend(); ++it) {
    if (!j.contains(it->kind)) j[it->kind] = Json{{"point", it->point}, {"value", it->value}};
  }
  return j;
}

ScenarioResult from_reports(std::vector<VerificationReport> reports, Json extra = Json::object()) {
  ScenarioResult r;
  r.json = std::move(extra);
  Json arr = Json::array();
  for (const auto& rep : reports) {
    arr.push_back(to_json(rep));
    r.pass = r.pass && rep.pass;
  }
  r.json["reports"] = std::move(arr);
  return r;
}

ScenarioResult run_two_sphere(const Scenario& s) {
  const int order = quad_order_of(s);
  const double tol = tolerance_of(s, kDefaultTolerance);
  if (s.variant == "normal") {
    const Ball omega(center_of(s), s.r1);
    const CompactSupport K{omega};
    const SignedMeasure lambda = normal_measure(omega, x_of(s));
    const auto grid = grid_for(s, K, true);
    VerificationReport pure = verify_pure_binormal(lambda, K, grid, order, tol);
    VerificationReport normal = verify_2normal(lambda, K, grid, order, tol);
    Json extra{{"measure", describe(lambda)}, {"probe", probe_json(pure)}};
    return from_reports({std::move(pure), std::move(normal)}, std::move(extra));
  }
  if (s.variant != "binormal") throw ConfigError(where(s) + ": variant must be 'binormal' or 'normal'");
  const TwoSphereConfig cfg = TwoSphereConfig::make(center_of(s), s.r1, s.r2, x_of(s));
  const SignedMeasure lambda = two_sphere_binormal(cfg);
  const CompactSupport K{cfg.omega2};
  VerificationReport pure = verify_pure_binormal(lambda, K, grid_for(s, K, true), order, tol);
  Json extra{{"coefficients", to_json(coefficients(cfg))},
             {"measure", describe(lambda)},
             {"total_mass", total_mass(lambda)},
             {"probe", probe_json(pure)}};
  return from_reports({std::move(pure)}, std::move(extra));
}

ScenarioResult run_superposed(const Scenario& s) {
  if (s.atoms.empty()) throw ConfigError(where(s) + ": superposed needs at least one atom");
  if (!s.weights.empty() && s.weights.size() != s.atoms.size()) {
    throw ConfigError(where(s) + ": weights must match atoms in length");
  }
  SignedMeasure nu;
  std::vector<AtomSpheres> spheres;
  Point mean(s.dim);
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const Point a = to_point(s, s.atoms[i], "atoms[" + std::to_string(i) + "]");
    nu += SignedMeasure::dirac(a, s.weights.empty() ? 1.0 : s.weights[i]);
    spheres.push_back({a, s.r1, s.r2});
    mean += a * (1.0 / static_cast<double>(s.atoms.size()));
  }
  double reach = 0.0;
  for (const AtomSpheres& sp : spheres) reach = std::max(reach, distance(sp.center, mean) + s.r2);
  const CompactSupport K{Ball(mean, reach)};
  const SignedMeasure lambda = superposed_binormal(nu, spheres);
  VerificationReport pure =
      verify_pure_binormal(lambda, K, grid_for(s, K, false), quad_order_of(s), tolerance_of(s, kDefaultTolerance));
  Json extra{{"support", {{"center", to_json(K.ball.center())}, {"radius", K.ball.radius()}}},
             {"total_mass", total_mass(lambda)},
             {"terms", lambda.terms().size()}};
  return from_reports({std::move(pure)}, std::move(extra));
}

ScenarioResult run_choquet_deny(const Scenario& s) {
  const Ball E(center_of(s), s.radius.value_or(1.0));
  const SignedMeasure lambda = normal_measure(E, x_of(s));
  std::vector<Point> points = extra_points(s);
  if (points.empty()) {
    const double R = E.radius();
    const double dirs[5][3] = {{0.5, 0.0, 0.0}, {0.0, 0.3, 0.0}, {-0.2, 0.4, 0.1}, {0.1, -0.6, 0.2}, {0.7, 0.1, -0.3}};
    for (const auto& d : dirs) {
      Point p = E.center();
      for (int i = 0; i < s.dim; ++i) p[i] += R * d[i];
      points.push_back(p);
    }
  }
  KernelId kernel = KernelId::newtonian(s.dim);
  if (s.kernel == "ball-green") {
    kernel = KernelId::ball_green(E);
  } else if (s.kernel != "newtonian") {
    throw ConfigError(where(s) + ": kernel must be 'newtonian' or 'ball-green'");
  }
  const SignedMeasure prime = choquet_deny_prime(lambda, E, kernel);
  const auto& density = std::get<VolumeDensity>(prime.terms().front().component).density;
  Json samples = Json::array();
  for (const Point& p : points) samples.push_back(Json{{"point", to_json(p)}, {"density", density(p)}});
  VerificationReport fubini = verify_choquet_deny_fubini(lambda, E, points, tolerance_of(s, 1e-6));
  Json extra{{"measure", describe(lambda)},
             {"density_kernel", to_string(kernel.tag)},
             {"lambda_prime_mass", total_mass(prime)},
             {"density_samples", std::move(samples)}};
  return from_reports({std::move(fubini)}, std::move(extra));
}

ScenarioResult run_sweep(const Scenario& s) {
  const double tol = tolerance_of(s, kDefaultTolerance);
  if (s.variant == "normal") {
    const Ball omega(center_of(s), s.r1);
    const CompactSupport K{omega};
    const Point x = x_of(s);
    const auto tests = polynomial_test_functions(s.dim);
    VerificationReport sweep =
        verify_sweep_identity(SignedMeasure::dirac(x), SignedMeasure::harmonic(omega, x, -1.0), K, tests, tol);
    VerificationReport pure = verify_pure_binormal(normal_measure(omega, x), K, grid_for(s, K, true),
                                                   quad_order_of(s), tol);
    return from_reports({std::move(sweep), std::move(pure)});
  }
  if (s.variant != "binormal") throw ConfigError(where(s) + ": variant must be 'binormal' or 'normal'");
  const TwoSphereConfig cfg = TwoSphereConfig::make(center_of(s), s.r1, s.r2, x_of(s));
  return from_reports({verify_sweep_decomposition(cfg, tol)}, Json{{"coefficients", to_json(coefficients(cfg))}});
}

ScenarioResult run_generators(const Scenario& s) {
  const TwoSphereConfig cfg = TwoSphereConfig::make(center_of(s), s.r1, s.r2, x_of(s));
  std::vector<NamedField> tests;
  if (s.test == "exp") {
    tests.push_back({"exp(z1)", [](const Point& z) { return std::exp(z[0]); }});
  } else if (s.test != "poly") {
    throw ConfigError(where(s) + ": test must be 'poly' or 'exp'");
  }
  GeneratorExpansion g = generator_expansion(cfg, s.m, tests, tolerance_of(s, kDefaultTolerance));
  Json extra{{"coefficients", to_json(coefficients(cfg))}, {"terms", g.lambda_m.terms().size()}};
  return from_reports({std::move(g.report)}, std::move(extra));
}

ScenarioResult run_normal(const Scenario& s) {
  const Ball omega(center_of(s), s.r1);
  const CompactSupport K{omega};
  const SignedMeasure mu = normal_measure(omega, x_of(s));
  return from_reports({verify_2normal(mu, K, grid_for(s, K, true), quad_order_of(s), tolerance_of(s, kDefaultTolerance))},
                      Json{{"measure", describe(mu)}});
}

SignedMeasure literal_measure(const Scenario& s) {
  SignedMeasure m;
  for (std::size_t i = 0; i < s.measure.size(); ++i) {
    const MeasureLiteral& lit = s.measure[i];
    const std::string field = "measure[" + std::to_string(i) + "]";
    if (lit.kind == "atom") {
      m += SignedMeasure::dirac(to_point(s, lit.location, field + ".location"), lit.weight);
    } else if (lit.kind == "harmonic") {
      const Ball b(to_point(s, lit.center, field + ".center"), lit.radius);
      const Point base = lit.base.empty() ? b.center() : to_point(s, lit.base, field + ".base");
      m += SignedMeasure::harmonic(b, base, lit.weight);
    } else {
      throw ConfigError(where(s) + ": " + field + ".kind must be 'atom' or 'harmonic'");
    }
  }
  return m;
}

ScenarioResult run_measure(const Scenario& s) {
  if (!s.support_radius) throw ConfigError(where(s) + ": measure scenarios need support.radius");
  const Point c = s.support_center ? to_point(s, *s.support_center, "support.center") : Point(s.dim);
  const CompactSupport K{Ball(c, *s.support_radius)};
  const SignedMeasure m = literal_measure(s);
  const auto grid = grid_for(s, K, true);
  const double tol = tolerance_of(s, kDefaultTolerance);
  VerificationReport r;
  if (s.verifier == "pure-binormal") {
    r = verify_pure_binormal(m, K, grid, quad_order_of(s), tol);
  } else if (s.verifier == "2-normal") {
    r = verify_2normal(m, K, grid, quad_order_of(s), tol);
  } else {
    throw ConfigError(where(s) + ": verifier must be 'pure-binormal' or '2-normal'");
  }
  return from_reports({std::move(r)}, Json{{"measure", describe(m)}, {"total_mass", total_mass(m)}});
}

WosDomain domain_of(const Scenario& s) {
  if (s.domain == "ball") return WosDomain::ball(Ball(center_of(s), s.radius.value_or(1.0)));
  if (s.domain == "box") {
    if (!s.lower || !s.upper) throw ConfigError(where(s) + ": box domains need lower and upper");
    return WosDomain::box(to_point(s, *s.lower, "lower"), to_point(s, *s.upper, "upper"));
  }
  throw ConfigError(where(s) + ": domain must be 'ball' or 'box'");
}

Point start_of(const Scenario& s) {
  if (s.x) return to_point(s, *s.x, "x");
  if (s.domain == "box" && s.lower && s.upper) {
    return (to_point(s, *s.lower, "lower") + to_point(s, *s.upper, "upper")) * 0.5;
  }
  return center_of(s);
}

WosConfig wos_config(const Scenario& s, std::size_t default_samples) {
  WosConfig c;
  c.eps_shell = s.eps;
  c.max_steps = s.max_steps;
  c.samples = s.samples > 0 ? s.samples : default_samples;
  c.seed = s.seed;
  c.threads = s.threads;
  c.nested_budget = s.nested_budget;
  return c;
}

ScalarField field_of(const Polynomial& p) {
  return [p](const Point& z) { return p(z); };
}

// |estimate - exact| <= 4 stderr, with a rounding allowance for stderr = 0.
bool within(const McEstimate& e, double exact) {
  return std::abs(e.value - exact) <= 4.0 * e.std_error + 1e-12 * std::max(1.0, std::abs(exact));
}

Json estimate_json(const McEstimate& e, std::optional<double> exact) {
  Json j = to_json(e);
  if (exact) {
    j["exact"] = *exact;
    j["error"] = e.value - *exact;
    j["within_4_stderr"] = within(e, *exact);
  }
  return j;
}

ScenarioResult run_wos_laplace(const Scenario& s) {
  const ZooMember g = zoo_lookup(s.g, s.dim);
  const WosDomain dom = domain_of(s);
  const Point x = start_of(s);
  const McEstimate e = wos_laplace(dom, field_of(g.u1), x, wos_config(s, 100000));
  std::optional<double> exact;
  if (g.u1.laplacian().is_zero()) exact = g.u1(x);
  ScenarioResult r;
  r.pass = exact ? within(e, *exact) : e.truncated_walks * 100 <= e.samples_used;
  r.json = Json{{"domain", dom.describe()}, {"point", to_json(x)}, {"estimates", {{"u", estimate_json(e, exact)}}}};
  return r;
}

ScenarioResult run_wos_riquier(const Scenario& s) {
  const ZooMember m1 = zoo_lookup(s.f1.empty() ? "poly:z1^2" : s.f1, s.dim);
  const bool own_f2 = !s.f2.empty();
  const Polynomial f2 = own_f2 ? zoo_lookup(s.f2, s.dim).u1 : m1.u2;
  const WosDomain dom = domain_of(s);
  const Point x = start_of(s);
  const RiquierEstimate e = wos_riquier(dom, field_of(m1.u1), field_of(f2), x, wos_config(s, 100000));
  std::optional<double> exact1, exact2;
  if (!own_f2 && m1.is_pair) {
    exact1 = m1.u1(x);
    exact2 = m1.u2(x);
  }
  ScenarioResult r;
  if (exact1) {
    r.pass = within(e.u1, *exact1) && within(e.u2, *exact2);
  } else {
    r.pass = e.u1.truncated_walks * 100 <= e.u1.samples_used;
  }
  r.json = Json{{"domain", dom.describe()},
                {"point", to_json(x)},
                {"estimates", {{"u1", estimate_json(e.u1, exact1)}, {"u2", estimate_json(e.u2, exact2)}}}};
  return r;
}

ScenarioResult run_two_sphere_walk(const Scenario& s) {
  const ZooMember m1 = zoo_lookup(s.f1.empty() ? "poly:z1^2" : s.f1, s.dim);
  const WosDomain dom = domain_of(s);
  const Point x = start_of(s);
  const WosConfig cfg = wos_config(s, 2000);
  const McEstimate e = two_sphere_walk(dom, field_of(m1.u1), x, cfg, s.ratio, s.depth_cap);
  ScenarioResult r;
  r.json = Json{{"domain", dom.describe()}, {"point", to_json(x)}, {"experimental", true}};
  Json estimates{{"u", to_json(e)}};
  if (m1.is_pair) {
    // Side-by-side Riquier run with f2 = -Delta f1; the gap is reported only.
    const RiquierEstimate q = wos_riquier(dom, field_of(m1.u1), field_of(m1.u2), x, cfg);
    estimates["riquier_u1"] = to_json(q.u1);
    const double spread = std::hypot(e.std_error, q.u1.std_error);
    r.json["discrepancy"] = Json{{"value", e.value - q.u1.value}, {"combined_stderr", spread}};
  }
  r.json["estimates"] = std::move(estimates);
  r.pass = true;
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"two-sphere", "superposed",  "choquet-deny", "sweep",
                                              "generators", "normal",      "measure",      "wos-laplace",
                                              "wos-riquier", "two-sphere-walk"};
  return kinds;
}

Json echo(const Scenario& s) {
  Json j{{"name", s.name}, {"kind", s.kind}, {"dim", s.dim}};
  const auto put_opt = [&](const char* key, const std::optional<Coords>& c) {
    if (c) j[key] = *c;
  };
  const std::string& k = s.kind;
  const bool wos = k == "wos-laplace" || k == "wos-riquier" || k == "two-sphere-walk";
  put_opt("center", s.center);
  put_opt("x", s.x);
  if (k == "two-sphere" || k == "sweep" || k == "generators" || k == "superposed") {
    j["r1"] = s.r1;
    j["r2"] = s.r2;
  }
  if (k == "normal") j["r1"] = s.r1;
  if (k == "two-sphere" || k == "sweep") j["variant"] = s.variant;
  if (k == "generators") {
    j["m"] = s.m;
    j["test"] = s.test;
  }
  if (k == "superposed") {
    j["atoms"] = s.atoms;
    j["weights"] = s.weights;
  }
  if (k == "choquet-deny") j["kernel"] = s.kernel;
  if (k == "measure") {
    Json lits = Json::array();
    for (const MeasureLiteral& m : s.measure) {
      Json l{{"weight", m.weight}, {"kind", m.kind}};
      if (m.kind == "atom") {
        l["location"] = m.location;
      } else {
        l["center"] = m.center;
        l["radius"] = m.radius;
        if (!m.base.empty()) l["base"] = m.base;
      }
      lits.push_back(std::move(l));
    }
    j["measure"] = std::move(lits);
    j["verifier"] = s.verifier;
    if (s.support_center) j["support_center"] = *s.support_center;
    if (s.support_radius) j["support_radius"] = *s.support_radius;
  }
  if (!s.points.empty()) j["points"] = s.points;
  if (s.tolerance) j["tolerance"] = *s.tolerance;
  if (s.quad_order > 0) j["quad_order"] = s.quad_order;
  if (wos) {
    j["domain"] = s.domain;
    if (s.radius) j["radius"] = *s.radius;
    put_opt("lower", s.lower);
    put_opt("upper", s.upper);
    if (k == "wos-laplace") j["g"] = s.g;
    if (k != "wos-laplace") j["f1"] = s.f1.empty() ? "poly:z1^2" : s.f1;
    if (k == "wos-riquier" && !s.f2.empty()) j["f2"] = s.f2;
    j["samples"] = s.samples > 0 ? s.samples : (k == "two-sphere-walk" ? 2000 : 100000);
    j["eps"] = s.eps;
    j["seed"] = s.seed;
    j["max_steps"] = s.max_steps;
    if (k == "wos-riquier") j["nested_budget"] = s.nested_budget;
    if (k == "two-sphere-walk") {
      j["ratio"] = s.ratio;
      j["depth_cap"] = s.depth_cap;
    }
  } else if (k == "choquet-deny" && s.radius) {
    j["radius"] = *s.radius;
  }
  return j;
}

ScenarioResult execute(const Scenario& s) {
  if (s.dim < 2 || s.dim > kMaxDim) throw ConfigError(where(s) + ": dim out of range");
  if (s.kind == "two-sphere") return run_two_sphere(s);
  if (s.kind == "superposed") return run_superposed(s);
  if (s.kind == "choquet-deny") return run_choquet_deny(s);
  if (s.kind == "sweep") return run_sweep(s);
  if (s.kind == "generators") return run_generators(s);
  if (s.kind == "normal") return run_normal(s);
  if (s.kind == "measure") return run_measure(s);
  if (s.kind == "wos-laplace") return run_wos_laplace(s);
  if (s.kind == "wos-riquier") return run_wos_riquier(s);
  if (s.kind == "two-sphere-walk") return run_two_sphere_walk(s);
  throw ConfigError(where(s) + ": unknown kind '" + s.kind + "'");
}

Coords parse_coords(const std::string& text) {
  Coords out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty coordinate in '" + text + "'");
    const std::string token = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) throw ConfigError("bad coordinate '" + token + "' in '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("no coordinates in '" + text + "'");
  return out;
}

std::vector<Coords> parse_coord_list(const std::string& text) {
  std::vector<Coords> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_coords(item));
  return out;
}

}  // namespace binormal::cli

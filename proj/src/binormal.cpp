#include "binormal/binormal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binormal/errors.hpp"
#include "binormal/funczoo.hpp"
#include "binormal/kernels.hpp"

namespace binormal {

namespace {

const Ball* sphere_of(const MeasureComponent& c) {
  if (const auto* h = std::get_if<HarmonicMeasure>(&c)) return &h->ball;
  if (const auto* s = std::get_if<SurfaceDensity>(&c)) return &s->sphere;
  return nullptr;
}

int measure_dim(const SignedMeasure& m, const CompactSupport& K) {
  if (!m.empty() && m.dim() != K.ball.dim()) throw DomainError("measure and K have different dimensions");
  const int n = K.ball.dim();
  if (n != 2 && n != 3) throw UnsupportedError("verifiers support n = 2, 3");
  return n;
}

void check_grid(const CompactSupport& K, std::span<const Point> grid) {
  for (const Point& y : grid) {
    if (y.dim() != K.ball.dim()) throw DomainError("grid point " + to_string(y) + " has the wrong dimension");
    if (!K.strictly_outside(y)) {
      throw DomainError("grid point " + to_string(y) + " is not strictly outside " + to_string(K.ball));
    }
  }
}

std::vector<double> coords_of(const Point& p) { return {p.coords().begin(), p.coords().end()}; }

IntegrationOptions with_order(int order) {
  IntegrationOptions o;
  o.quad_order = order;
  return o;
}

// Appends kernel-potential residuals of m over the grid.
void potential_residuals(VerificationReport& report, const SignedMeasure& m, const KernelId& kernel,
                         const std::string& kind, std::span<const Point> grid, int order) {
  std::optional<PotentialEvaluator> eval;
  if (!m.empty()) eval.emplace(m, kernel, with_order(order));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = eval ? (*eval)(grid[i]) : 0.0;
    report.residuals.push_back({kind + "[" + std::to_string(i) + "]", kind, v, coords_of(grid[i])});
  }
}

}  // namespace

TwoSphereConfig TwoSphereConfig::make(const Point& center, double r1, double r2, const Point& x) {
  TwoSphereConfig cfg{x, Ball(center, r1), Ball(center, r2)};
  cfg.validate();
  return cfg;
}

void TwoSphereConfig::validate() const {
  if (x.dim() != omega1.dim() || x.dim() != omega2.dim()) throw DomainError("two-sphere config: dimension mismatch");
  if (!(omega1.center() == omega2.center())) throw DomainError("two-sphere config: balls are not concentric");
  if (!(omega1.radius() < omega2.radius())) throw DomainError("two-sphere config: need r1 < r2");
  if (!(distance(x, omega1.center()) < omega1.radius())) {
    throw DomainError("two-sphere config: x = " + to_string(x) + " is not inside " + to_string(omega1));
  }
}

Coefficients coefficients(const TwoSphereConfig& cfg) {
  cfg.validate();
  const double r1 = cfg.omega1.radius();
  const double r2 = cfg.omega2.radius();
  const double rho = distance(cfg.x, cfg.omega1.center());
  Coefficients c;
  c.rho = rho;
  c.alpha = (r2 * r2 - rho * rho) / (r2 * r2 - r1 * r1);
  // alpha >= 1, so alpha - 1 is exact and alpha - beta == 1 holds bit for bit.
  c.beta = c.alpha - 1.0;
  if (c.beta < 0.0) c.beta = 0.0;
  return c;
}

SignedMeasure two_sphere_binormal(const TwoSphereConfig& cfg) {
  const Coefficients c = coefficients(cfg);
  return SignedMeasure({Term{1.0, PointMass{cfg.x}}, Term{-c.alpha, HarmonicMeasure{cfg.omega1, cfg.x}},
                        Term{c.beta, HarmonicMeasure{cfg.omega2, cfg.x}}});
}

SignedMeasure normal_measure(const Ball& omega, const Point& x) {
  return SignedMeasure::dirac(x) + SignedMeasure::harmonic(omega, x, -1.0);
}

SignedMeasure superposed_binormal(const SignedMeasure& nu, std::span<const AtomSpheres> spheres) {
  if (nu.terms().size() != spheres.size()) {
    throw DomainError("superposed_binormal: need one sphere pair per atom");
  }
  SignedMeasure out;
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    const Term& t = nu.terms()[i];
    const auto* atom = std::get_if<PointMass>(&t.component);
    if (atom == nullptr) throw DomainError("superposed_binormal: nu must be atomic, got " + describe(t.component));
    const AtomSpheres& s = spheres[i];
    out += two_sphere_binormal(TwoSphereConfig::make(s.center, s.r1, s.r2, atom->location)) * t.weight;
  }
  return out;
}

SignedMeasure choquet_deny_prime(const SignedMeasure& lambda, const Ball& E, const KernelId& kernel, int quad_order) {
  const int n = E.dim();
  if (n != 2 && n != 3) throw UnsupportedError("choquet_deny_prime supports n = 2, 3");
  if (!lambda.empty() && lambda.dim() != n) throw DomainError("choquet_deny_prime: dimension mismatch");
  kernel.validate();
  if (kernel.dim != n) throw DomainError("choquet_deny_prime: kernel dimension mismatch");
  if (kernel.tag != KernelTag::kNewtonian && kernel.tag != KernelTag::kBallGreen) {
    throw UnsupportedError("choquet_deny_prime needs the newtonian or a ball Green kernel");
  }
  if (!supported_in(lambda, CompactSupport{E})) {
    throw DomainError("choquet_deny_prime: lambda is not supported in " + to_string(E));
  }

  std::vector<Point> atoms;
  SignedMeasure surfaces;
  VolumeRule rule;
  for (const Term& t : lambda.terms()) {
    if (const auto* p = std::get_if<PointMass>(&t.component)) {
      if (E.contains_strictly(p->location)) atoms.push_back(p->location);
    } else if (const auto* h = std::get_if<HarmonicMeasure>(&t.component)) {
      if (!(h->ball == E)) rule.interfaces.push_back(h->ball);
    } else if (const auto* sd = std::get_if<SurfaceDensity>(&t.component)) {
      if (!(sd->sphere == E)) rule.interfaces.push_back(sd->sphere);
      surfaces += SignedMeasure({t});
    } else if (std::holds_alternative<VolumeDensity>(t.component)) {
      throw UnsupportedError("choquet_deny_prime: lambda may not contain volume densities");
    }
  }

  const std::vector<Term> terms = lambda.terms();
  IntegrationOptions opts;
  opts.quad_order = quad_order;
  auto density = [terms, kernel, opts, surfaces](const Point& x) {
    double s = 0.0;
    for (const Term& t : terms) {
      if (const auto* p = std::get_if<PointMass>(&t.component)) {
        s += t.weight * evaluate(kernel, x, p->location);
      } else if (const auto* h = std::get_if<HarmonicMeasure>(&t.component)) {
        s += t.weight * harmonic_measure_potential(*h, kernel, x);
      }
    }
    if (!surfaces.empty()) {
      s += integrate(surfaces, [&](const Point& z) { return evaluate(kernel, x, z); }, opts);
    }
    return s;
  };
  return SignedMeasure::volume(E, std::move(density), std::move(atoms), rule);
}

void VerificationReport::finalize() {
  max_abs = 0.0;
  double sum = 0.0;
  bool finite = true;
  for (const Residual& r : residuals) {
    if (!std::isfinite(r.value)) finite = false;
    max_abs = std::max(max_abs, std::abs(r.value));
    sum += std::abs(r.value);
  }
  mean_abs = residuals.empty() ? 0.0 : sum / static_cast<double>(residuals.size());
  pass = finite && max_abs <= tolerance;
}

double VerificationReport::max_abs_of(const std::string& kind) const {
  double m = 0.0;
  for (const Residual& r : residuals) {
    if (r.kind == kind) m = std::max(m, std::abs(r.value));
  }
  return m;
}

std::vector<Point> default_exterior_grid(const CompactSupport& K) {
  const int n = K.ball.dim();
  if (n != 2 && n != 3) throw UnsupportedError("default_exterior_grid supports n = 2, 3");
  constexpr int kPerShell = 36;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Point> grid;
  for (const double scale : {1.2, 2.0, 5.0}) {
    const double r = scale * K.ball.radius();
    for (int i = 0; i < kPerShell; ++i) {
      Point d(n);
      if (n == 2) {
        const double phi = 2.0 * std::numbers::pi * i / kPerShell;
        d[0] = std::cos(phi);
        d[1] = std::sin(phi);
      } else {
        const double z = 1.0 - (2.0 * i + 1.0) / kPerShell;
        const double s = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        d[0] = s * std::cos(phi);
        d[1] = s * std::sin(phi);
        d[2] = z;
      }
      grid.push_back(K.ball.center() + d * r);
    }
  }
  return grid;
}

namespace {

// Geometric convergence ratio of sphere rules for kernels with poles at
// `points`, and for the Poisson density of off-center harmonic measures.
double convergence_ratio(const SignedMeasure& m, std::span<const Point> points) {
  double ratio = 0.0;
  for (const Term& t : m.terms()) {
    const Ball* s = sphere_of(t.component);
    if (s == nullptr) continue;
    const double R = s->radius();
    if (const auto* h = std::get_if<HarmonicMeasure>(&t.component)) {
      ratio = std::max(ratio, distance(h->base, s->center()) / R);
    }
    for (const Point& y : points) {
      const double d = distance(y, s->center());
      if (d > R * (1.0 + 1e-12)) {
        ratio = std::max(ratio, R / d);
      } else if (d < R * (1.0 - 1e-12)) {
        ratio = std::max(ratio, d / R);
      } else {
        ratio = 1.0;
      }
    }
  }
  return ratio;
}

}  // namespace

int auto_quad_order(const SignedMeasure& m, std::span<const Point> points, int cap, double target) {
  const double ratio = convergence_ratio(m, points);
  constexpr int kFloor = 32;
  if (ratio <= 0.0) return std::min(kFloor, cap);
  if (ratio >= 1.0) return cap;
  const double q = std::ceil(std::log(target) / std::log(ratio)) + 8.0;
  return static_cast<int>(std::clamp(q, static_cast<double>(kFloor), static_cast<double>(cap)));
}

VerificationReport verify_pure_binormal(const SignedMeasure& lambda, const CompactSupport& K,
                                        std::span<const Point> grid, int quad_order, double tolerance) {
  const int n = measure_dim(lambda, K);
  if (!supported_in(lambda, K)) throw DomainError("verify_pure_binormal: lambda is not supported in K");
  check_grid(K, grid);
  const int order = quad_order > 0 ? quad_order : auto_quad_order(lambda, grid);
  VerificationReport report;
  report.name = "pure-binormal";
  report.tolerance = tolerance;
  potential_residuals(report, lambda, KernelId::biharm_fundamental(n), "r_w", grid, order);
  potential_residuals(report, lambda, KernelId::newtonian(n), "r_p", grid, order);
  report.metadata = {{"dim", n}, {"grid_size", static_cast<double>(grid.size())}, {"quad_order", order}};
  report.finalize();
  return report;
}

VerificationReport verify_2normal(const SignedMeasure& mu, const CompactSupport& K, std::span<const Point> grid,
                                  int quad_order, double tolerance) {
  const int n = measure_dim(mu, K);
  if (!supported_in(mu, K)) throw DomainError("verify_2normal: mu is not supported in K");
  check_grid(K, grid);
  const int order = quad_order > 0 ? quad_order : auto_quad_order(mu, grid);
  VerificationReport report;
  report.name = "2-normal";
  report.tolerance = tolerance;
  potential_residuals(report, mu, KernelId::newtonian(n), "r_p", grid, order);
  report.metadata = {{"dim", n}, {"grid_size", static_cast<double>(grid.size())}, {"quad_order", order}};
  report.finalize();
  return report;
}

std::vector<NamedField> polynomial_test_functions(int n) {
  static const char* const kExprs[] = {"1",    "z1",           "z2",         "z1^2 - z2^2", "|z|^2",
                                       "z1*z2^2 + 1/2*z1", "|z|^4", "z1^5 - 3*z2", "|z|^6", "z1^3*z2^3 - z1*z2"};
  std::vector<NamedField> out;
  for (const char* e : kExprs) {
    Polynomial p = parse_polynomial(e, n);
    out.push_back({std::string("poly:") + e, [p](const Point& z) { return p(z); }});
  }
  return out;
}

VerificationReport verify_sweep_identity(const SignedMeasure& xi, const SignedMeasure& sigma, const CompactSupport& K,
                                         std::span<const NamedField> tests, double tolerance) {
  const SignedMeasure swept = sweep_harmonic(xi, K, auto_quad_order(xi));
  const SignedMeasure diff = swept + sigma;
  const IntegrationOptions opts = with_order(auto_quad_order(diff));

  VerificationReport report;
  report.name = "sweep-decomposition";
  report.tolerance = tolerance;
  for (const NamedField& t : tests) {
    const double v = integrate(swept, t.f, opts) + integrate(sigma, t.f, opts);
    report.residuals.push_back({t.name, "weak", v, {}});
  }
  report.residuals.push_back({"mass", "mass", total_mass(swept) + total_mass(sigma), {}});
  report.residuals.push_back({"combined-total-variation", "symbolic", diff.combined().total_variation(), {}});
  report.metadata = {{"dim", K.ball.dim()},
                     {"quad_order", opts.quad_order},
                     {"test_functions", static_cast<double>(tests.size())},
                     {"swept_mass", total_mass(swept)}};
  report.finalize();
  return report;
}

VerificationReport verify_sweep_decomposition(const TwoSphereConfig& cfg, double tolerance) {
  const Coefficients c = coefficients(cfg);
  const SignedMeasure xi = SignedMeasure::dirac(cfg.x) + SignedMeasure::harmonic(cfg.omega1, cfg.x, -c.alpha);
  const SignedMeasure sigma = SignedMeasure::harmonic(cfg.omega2, cfg.x, c.beta);
  const auto tests = polynomial_test_functions(cfg.dim());
  VerificationReport report = verify_sweep_identity(xi, sigma, CompactSupport{cfg.omega2}, tests, tolerance);
  report.metadata["alpha"] = c.alpha;
  report.metadata["beta"] = c.beta;
  return report;
}

int min_generator_atoms(int n) {
  if (n == 2) return 2;
  if (n == 3) return 3;
  throw UnsupportedError("generator_expansion supports n = 2, 3");
}

namespace {

// Largest-order deterministic rule on the sphere with at most m nodes.
QuadratureRule rule_with_at_most(const Ball& sphere, int m) {
  if (sphere.dim() == 2) return circle_rule(sphere, m);
  QuadratureRule best = sphere_quadrature(sphere, 1);
  for (int q = 2;; ++q) {
    QuadratureRule r = sphere_quadrature(sphere, q);
    if (r.size() > static_cast<std::size_t>(m)) return best;
    best = std::move(r);
  }
}

}  // namespace

GeneratorExpansion generator_expansion(const TwoSphereConfig& cfg, int m, std::span<const NamedField> tests,
                                       double tolerance) {
  const Coefficients c = coefficients(cfg);
  const int n = cfg.dim();
  if (m < min_generator_atoms(n)) {
    throw DomainError("generator_expansion: m = " + std::to_string(m) + " is below the minimum " +
                      std::to_string(min_generator_atoms(n)));
  }
  const QuadratureRule rule = rule_with_at_most(cfg.omega1, m);

  std::vector<Term> terms{Term{1.0, PointMass{cfg.x}}, Term{-1.0, HarmonicMeasure{cfg.omega2, cfg.x}}};
  terms.reserve(2 + 2 * rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const Point& z = rule.nodes[j];
    const double w = rule.weights[j] * poisson_density(cfg.omega1, cfg.x, z);
    terms.push_back(Term{-c.alpha * w, PointMass{z}});
    terms.push_back(Term{c.alpha * w, HarmonicMeasure{cfg.omega2, z}});
  }
  GeneratorExpansion out{SignedMeasure(std::move(terms)), {}};

  std::vector<NamedField> defaults;
  if (tests.empty()) {
    defaults = polynomial_test_functions(n);
    tests = defaults;
  }
  const SignedMeasure lambda = two_sphere_binormal(cfg);
  const IntegrationOptions opts_m = with_order(auto_quad_order(out.lambda_m));
  const IntegrationOptions opts_l = with_order(auto_quad_order(lambda));

  VerificationReport& report = out.report;
  report.name = "generator-expansion";
  report.tolerance = tolerance;
  for (const NamedField& t : tests) {
    const double v = integrate(out.lambda_m, t.f, opts_m) - integrate(lambda, t.f, opts_l);
    report.residuals.push_back({t.name, "weak", v, {}});
  }
  report.metadata = {{"dim", n},
                     {"m", m},
                     {"atoms", static_cast<double>(rule.size())},
                     {"quad_order", opts_m.quad_order},
                     {"reference_quad_order", opts_l.quad_order},
                     {"alpha", c.alpha}};
  report.finalize();
  return out;
}

namespace {

constexpr int kFubiniVolumeOrder = 32;

}  // namespace

VerificationReport verify_choquet_deny_fubini(const SignedMeasure& lambda, const Ball& E, std::span<const Point> points,
                                              double tolerance) {
  const KernelId kernel = KernelId::ball_green(E);
  const SignedMeasure prime = choquet_deny_prime(lambda, E, kernel);
  const PotentialEvaluator lhs(prime, kernel);
  // Each node of the sphere rule costs one volume quadrature of the iterated
  // kernel, so the order only resolves the tolerance (with a factor 100 margin).
  // Terms on the sphere of E contribute nothing: the iterated kernel vanishes there.
  std::vector<Term> inner;
  for (const Term& t : lambda.terms()) {
    const Ball* s = sphere_of(t.component);
    if (s == nullptr || !(*s == E)) inner.push_back(t);
  }
  const double ratio = convergence_ratio(SignedMeasure(inner), points);
  int order = 8;
  if (ratio >= 1.0) {
    order = kDefaultMaxQuadOrder;
  } else if (ratio > 0.0) {
    const double target = std::max(1e-16, 1e-2 * tolerance);
    order = std::clamp(static_cast<int>(std::ceil(std::log(target) / std::log(ratio))), 8, kDefaultMaxQuadOrder);
  }
  const IntegrationOptions opts = with_order(order);
  VerificationReport report;
  report.name = "choquet-deny-fubini";
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& y = points[i];
    if (!E.contains_strictly(y)) throw DomainError("fubini point " + to_string(y) + " is not inside " + to_string(E));
    const double rhs =
        integrate(lambda, [&](const Point& z) { return iterated_ball_green(E, y, z, kFubiniVolumeOrder); }, opts);
    report.residuals.push_back({"fubini[" + std::to_string(i) + "]", "fubini", lhs(y) - rhs, coords_of(y)});
  }
  report.metadata = {{"dim", E.dim()}, {"points", static_cast<double>(points.size())}, {"quad_order", opts.quad_order}, {"lambda_prime_mass",
                     total_mass(prime)}};
  report.finalize();
  return report;
}

double mean_value_defect(const ScalarField& f, const TwoSphereConfig& cfg, int quad_order) {
  const Coefficients c = coefficients(cfg);
  const SignedMeasure mu1 = SignedMeasure::harmonic(cfg.omega1, cfg.x);
  const SignedMeasure mu2 = SignedMeasure::harmonic(cfg.omega2, cfg.x);
  const int order = quad_order > 0 ? quad_order : auto_quad_order(mu1 + mu2);
  const IntegrationOptions opts = with_order(order);
  const double fx = f(cfg.x);
  if (!std::isfinite(fx)) throw SingularityError("mean_value_defect: f(x) is not finite");
  return c.alpha * integrate(mu1, f, opts) - c.beta * integrate(mu2, f, opts) - fx;
}

}  // namespace binormal

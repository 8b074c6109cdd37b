#include "binormal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "binormal/errors.hpp"

namespace binormal {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double poisson_unchecked(const Ball& ball, const Point& base, const Point& z) {
  const int n = ball.dim();
  const double R = ball.radius();
  const double num = (R * R - norm2(base - ball.center())) * std::pow(R, n - 2);
  return num / std::pow(distance(base, z), n);
}

void require_finite(double value, const Point& where) {
  if (!std::isfinite(value)) {
    throw SingularityError("integrand is not finite at " + to_string(where));
  }
}

// Calls visit(node, weight) for a rule realizing the normalized surface
// measure of `sphere`.
template <class Visit>
void for_each_sphere_node(const Ball& sphere, const IntegrationOptions& opts, Visit&& visit) {
  if (sphere.dim() <= 3) {
    const QuadratureRule rule = sphere_quadrature(sphere, opts.quad_order);
    for (std::size_t i = 0; i < rule.size(); ++i) visit(rule.nodes[i], rule.weights[i]);
    return;
  }
  const double w = 1.0 / static_cast<double>(opts.mc.count);
  for (std::size_t i = 0; i < opts.mc.count; ++i) visit(mc_sphere_sample(sphere, opts.mc.seed, i), w);
}

}  // namespace

int component_dim(const MeasureComponent& c) {
  return std::visit(Overloaded{[](const PointMass& p) { return p.location.dim(); },
                               [](const HarmonicMeasure& h) { return h.ball.dim(); },
                               [](const SurfaceDensity& s) { return s.sphere.dim(); },
                               [](const VolumeDensity& v) { return v.ball.dim(); }},
                    c);
}

double component_mass(const MeasureComponent& c) {
  return std::visit(Overloaded{[](const PointMass&) { return 1.0; }, [](const HarmonicMeasure&) { return 1.0; },
                               [](const SurfaceDensity& s) { return s.mass; },
                               [](const VolumeDensity& v) { return v.mass; }},
                    c);
}

std::string describe(const MeasureComponent& c) {
  return std::visit(
      Overloaded{[](const PointMass& p) { return "dirac" + to_string(p.location); },
                 [](const HarmonicMeasure& h) { return "harmonic[" + to_string(h.ball) + ", base " + to_string(h.base) + "]"; },
                 [](const SurfaceDensity& s) { return "surface[" + to_string(s.sphere) + "]"; },
                 [](const VolumeDensity& v) { return "volume[" + to_string(v.ball) + "]"; }},
      c);
}

SignedMeasure::SignedMeasure(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const Term& t : terms_) {
    if (!std::isfinite(t.weight)) throw DomainError("measure weight is not finite");
    const int d = component_dim(t.component);
    if (dim_ == 0) dim_ = d;
    if (d != dim_) throw DomainError("measure terms have inconsistent dimensions");
    if (const auto* h = std::get_if<HarmonicMeasure>(&t.component)) {
      if (h->base.dim() != d || !h->ball.contains_strictly(h->base)) {
        throw DomainError("harmonic measure base " + to_string(h->base) + " is not inside " + to_string(h->ball));
      }
    }
  }
}

SignedMeasure SignedMeasure::dirac(const Point& location, double weight) {
  if (!is_finite(location)) throw DomainError("atom location is not finite");
  return SignedMeasure({Term{weight, PointMass{location}}});
}

SignedMeasure SignedMeasure::harmonic(const Ball& ball, const Point& base, double weight) {
  return SignedMeasure({Term{weight, HarmonicMeasure{ball, base}}});
}

SignedMeasure SignedMeasure::surface(const Ball& sphere, ScalarField density, int quad_order, double weight) {
  if (sphere.dim() > 3) throw UnsupportedError("surface densities are implemented for n = 2, 3");
  const QuadratureRule rule = sphere_quadrature(sphere, quad_order);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = density(rule.nodes[i]);
    require_finite(v, rule.nodes[i]);
    mass += rule.weights[i] * v;
  }
  return SignedMeasure({Term{weight, SurfaceDensity{sphere, std::move(density), mass}}});
}

SignedMeasure SignedMeasure::volume(const Ball& ball, ScalarField density, std::vector<Point> singular_points,
                                    const VolumeRule& rule, double weight) {
  const double mass = integrate_ball_split(ball, singular_points, density, rule);
  if (!std::isfinite(mass)) throw SingularityError("volume density has non-finite mass");
  return SignedMeasure(
      {Term{weight, VolumeDensity{ball, std::move(density), std::move(singular_points), mass, rule.interfaces}}});
}

SignedMeasure& SignedMeasure::operator+=(const SignedMeasure& other) {
  if (other.empty()) return *this;
  if (dim_ != 0 && other.dim_ != dim_) throw DomainError("cannot add measures of different dimensions");
  dim_ = other.dim_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

SignedMeasure& SignedMeasure::operator*=(double s) {
  for (Term& t : terms_) t.weight *= s;
  return *this;
}

SignedMeasure SignedMeasure::positive_part() const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (t.weight > 0.0) out.push_back(t);
  }
  return SignedMeasure(std::move(out));
}

SignedMeasure SignedMeasure::negative_part() const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (t.weight < 0.0) out.push_back(Term{-t.weight, t.component});
  }
  return SignedMeasure(std::move(out));
}

double SignedMeasure::total_variation() const {
  double tv = 0.0;
  for (const Term& t : terms_) tv += std::abs(t.weight) * std::abs(component_mass(t.component));
  return tv;
}

namespace {

bool same_component(const MeasureComponent& a, const MeasureComponent& b) {
  if (const auto* pa = std::get_if<PointMass>(&a)) {
    const auto* pb = std::get_if<PointMass>(&b);
    return pb != nullptr && pa->location == pb->location;
  }
  if (const auto* ha = std::get_if<HarmonicMeasure>(&a)) {
    const auto* hb = std::get_if<HarmonicMeasure>(&b);
    return hb != nullptr && ha->ball == hb->ball && ha->base == hb->base;
  }
  return false;
}

}  // namespace

SignedMeasure SignedMeasure::combined(double drop_below) const {
  std::vector<Term> merged;
  for (const Term& t : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Term& m) { return same_component(m.component, t.component); });
    if (it != merged.end()) {
      it->weight += t.weight;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [&](const Term& t) { return std::abs(t.weight) <= drop_below; });
  SignedMeasure out(std::move(merged));
  if (out.empty()) out.dim_ = dim_;
  return out;
}

std::string describe(const SignedMeasure& m) {
  if (m.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const Term& t : m.terms()) {
    if (!first) os << (t.weight < 0 ? " - " : " + ");
    else if (t.weight < 0) os << "-";
    os << std::abs(t.weight) << "*" << describe(t.component);
    first = false;
  }
  return os.str();
}

bool CompactSupport::contains(const Point& p, double rel_tol) const noexcept {
  return distance(p, ball.center()) <= ball.radius() * (1.0 + rel_tol);
}

bool CompactSupport::strictly_outside(const Point& p, double rel_tol) const noexcept {
  return distance(p, ball.center()) > ball.radius() * (1.0 + rel_tol);
}

bool supported_in(const SignedMeasure& m, const CompactSupport& K) {
  const auto sphere_inside = [&](const Ball& s) {
    return distance(s.center(), K.ball.center()) + s.radius() <= K.ball.radius() * (1.0 + 1e-12);
  };
  for (const Term& t : m.terms()) {
    const bool inside = std::visit(Overloaded{[&](const PointMass& p) { return K.contains(p.location); },
                                              [&](const HarmonicMeasure& h) { return sphere_inside(h.ball); },
                                              [&](const SurfaceDensity& s) { return sphere_inside(s.sphere); },
                                              [&](const VolumeDensity& v) { return sphere_inside(v.ball); }},
                                   t.component);
    if (!inside) return false;
  }
  return true;
}

double poisson_density(const Ball& ball, const Point& base, const Point& boundary_point) {
  if (base.dim() != ball.dim() || !ball.contains_strictly(base)) {
    throw DomainError("poisson_density: base " + to_string(base) + " is not inside " + to_string(ball));
  }
  if (boundary_point.dim() != ball.dim() || !ball.on_sphere(boundary_point, 1e-10)) {
    throw DomainError("poisson_density: " + to_string(boundary_point) + " is not on the sphere of " +
                      to_string(ball));
  }
  return poisson_unchecked(ball, base, boundary_point);
}

double integrate(const SignedMeasure& m, const ScalarField& f, const IntegrationOptions& opts) {
  double total = 0.0;
  for (const Term& t : m.terms()) {
    const double part = std::visit(
        Overloaded{
            [&](const PointMass& p) {
              const double v = f(p.location);
              require_finite(v, p.location);
              return v;
            },
            [&](const HarmonicMeasure& h) {
              double s = 0.0;
              for_each_sphere_node(h.ball, opts, [&](const Point& z, double w) {
                const double v = f(z);
                require_finite(v, z);
                s += w * v * poisson_unchecked(h.ball, h.base, z);
              });
              return s;
            },
            [&](const SurfaceDensity& sd) {
              double s = 0.0;
              for_each_sphere_node(sd.sphere, opts, [&](const Point& z, double w) {
                const double v = f(z);
                require_finite(v, z);
                s += w * v * sd.density(z);
              });
              return s;
            },
            [&](const VolumeDensity& vd) {
              std::vector<Point> singular = vd.singular_points;
              singular.insert(singular.end(), opts.extra_singular.begin(), opts.extra_singular.end());
              VolumeRule rule = opts.volume;
              rule.interfaces.insert(rule.interfaces.end(), vd.interfaces.begin(), vd.interfaces.end());
              const double s = integrate_ball_split(
                  vd.ball, singular,
                  [&](const Point& z) {
                    const double v = f(z);
                    require_finite(v, z);
                    return v * vd.density(z);
                  },
                  rule);
              return s;
            }},
        t.component);
    total += t.weight * part;
  }
  return total;
}

double total_mass(const SignedMeasure& m) {
  double total = 0.0;
  for (const Term& t : m.terms()) total += t.weight * component_mass(t.component);
  return total;
}

simd::NodeCloud discretize(const SignedMeasure& m, const IntegrationOptions& opts) {
  simd::NodeCloud cloud(std::max(m.dim(), 2));
  for (const Term& t : m.terms()) {
    std::visit(Overloaded{[&](const PointMass& p) { cloud.push_back(p.location.coords(), t.weight); },
                          [&](const HarmonicMeasure& h) {
                            for_each_sphere_node(h.ball, opts, [&](const Point& z, double w) {
                              cloud.push_back(z.coords(), t.weight * w * poisson_unchecked(h.ball, h.base, z));
                            });
                          },
                          [&](const SurfaceDensity& sd) {
                            for_each_sphere_node(sd.sphere, opts, [&](const Point& z, double w) {
                              cloud.push_back(z.coords(), t.weight * w * sd.density(z));
                            });
                          },
                          [&](const VolumeDensity&) {
                            throw DomainError("volume densities cannot be discretized onto a node cloud");
                          }},
               t.component);
  }
  return cloud;
}

PotentialEvaluator::PotentialEvaluator(SignedMeasure m, KernelId kernel, IntegrationOptions opts)
    : measure_(std::move(m)), kernel_(std::move(kernel)), opts_(std::move(opts)) {
  kernel_.validate();
  if (!measure_.empty() && measure_.dim() != kernel_.dim) {
    throw DomainError("measure and kernel dimensions differ");
  }
  profile_ = radial_profile(kernel_);
  const bool has_volume = std::any_of(measure_.terms().begin(), measure_.terms().end(), [](const Term& t) {
    return std::holds_alternative<VolumeDensity>(t.component);
  });
  if (profile_ && !has_volume) cloud_ = discretize(measure_, opts_);
}

double PotentialEvaluator::operator()(const Point& y) const {
  if (y.dim() != kernel_.dim) throw DomainError("evaluation point has the wrong dimension");
  double value;
  if (cloud_) {
    value = simd::weighted_sum(*profile_, *cloud_, y.coords());
  } else {
    IntegrationOptions o = opts_;
    o.extra_singular.push_back(y);
    value = integrate(measure_, [&](const Point& z) { return evaluate(kernel_, y, z, opts_.volume.radial_nodes); }, o);
  }
  if (!std::isfinite(value)) {
    throw SingularityError("potential is singular at " + to_string(y) + " (point on the support of an atom?)");
  }
  return value;
}

double potential(const SignedMeasure& m, const KernelId& kernel, const Point& y, const IntegrationOptions& opts) {
  return PotentialEvaluator(m, kernel, opts)(y);
}

double harmonic_measure_potential(const HarmonicMeasure& h, const KernelId& kernel, const Point& y) {
  const Ball& B = h.ball;
  if (B.dim() != 2 && B.dim() != 3) throw UnsupportedError("closed-form potentials need n = 2, 3");
  if (y.dim() != B.dim() || kernel.dim != B.dim()) throw DomainError("closed-form potential: dimension mismatch");
  const bool inside = distance(y, B.center()) < B.radius();
  const double inner = inside ? ball_green(B, y, h.base) : 0.0;
  switch (kernel.tag) {
    case KernelTag::kNewtonian:
      return newtonian(y, h.base) - inner;
    case KernelTag::kBallGreen: {
      const Ball& E = *kernel.ball;
      const double slack = 1e-12 * E.radius();
      if (distance(B.center(), E.center()) + B.radius() > E.radius() + slack) {
        throw UnsupportedError("closed-form potential: " + to_string(B) + " is not inside " + to_string(E));
      }
      return ball_green(E, y, h.base) - inner;
    }
    default:
      throw UnsupportedError("no closed-form potential for the " + to_string(kernel.tag) + " kernel");
  }
}

SignedMeasure sweep_harmonic(const SignedMeasure& m, const CompactSupport& K, int quad_order) {
  const Ball& kb = K.ball;
  const double R = kb.radius();
  constexpr double tol = 1e-12;
  std::vector<Term> out;
  out.reserve(m.terms().size());

  // Returns +1 (sphere outside K), 0 (sphere = boundary of K), -1 (strictly
  // inside K, concentric). Throws for general position.
  const auto classify_sphere = [&](const Ball& s, const MeasureComponent& c) {
    if (s.concentric_with(kb)) {
      if (std::abs(s.radius() - R) <= tol * R) return 0;
      return s.radius() < R ? -1 : 1;
    }
    if (distance(s.center(), kb.center()) - s.radius() > R * (1.0 + tol)) return 1;
    throw DomainError("sweep_harmonic: component " + describe(c) + " is neither an atom nor concentric with " +
                      to_string(kb));
  };

  for (const Term& t : m.terms()) {
    std::visit(
        Overloaded{
            [&](const PointMass& p) {
              if (distance(p.location, kb.center()) < R * (1.0 - tol)) {
                out.push_back(Term{t.weight, HarmonicMeasure{kb, p.location}});
              } else {
                out.push_back(t);
              }
            },
            [&](const HarmonicMeasure& h) {
              // int mu^K_z d mu^S_x(z) = mu^K_x for concentric S inside K.
              if (classify_sphere(h.ball, t.component) < 0) {
                out.push_back(Term{t.weight, HarmonicMeasure{kb, h.base}});
              } else {
                out.push_back(t);
              }
            },
            [&](const SurfaceDensity& sd) {
              if (classify_sphere(sd.sphere, t.component) >= 0) {
                out.push_back(t);
                return;
              }
              const QuadratureRule rule = sphere_quadrature(sd.sphere, quad_order);
              std::vector<double> w(rule.size());
              for (std::size_t i = 0; i < rule.size(); ++i) w[i] = rule.weights[i] * sd.density(rule.nodes[i]);
              auto swept = [kb, nodes = rule.nodes, w](const Point& zeta) {
                double s = 0.0;
                for (std::size_t i = 0; i < nodes.size(); ++i) s += w[i] * poisson_unchecked(kb, nodes[i], zeta);
                return s;
              };
              out.push_back(Term{t.weight, SurfaceDensity{kb, std::move(swept), sd.mass}});
            },
            [&](const VolumeDensity&) {
              throw DomainError("sweep_harmonic: volume densities are not supported");
            }},
        t.component);
  }
  return SignedMeasure(std::move(out));
}

double riquier_coupling_mass(const Ball& ball, const Point& x, int quad_order) {
  if (ball.dim() != 2 && ball.dim() != 3) throw UnsupportedError("riquier_coupling_mass supports n = 2, 3");
  if (x.dim() != ball.dim() || !ball.contains_strictly(x)) {
    throw DomainError("riquier_coupling_mass: " + to_string(x) + " is not inside " + to_string(ball));
  }
  const double mass = integrate_ball_polar(
      ball, x, [&](const Point& y) { return ball_green(ball, x, y); }, VolumeRule{quad_order, quad_order});
  if (!std::isfinite(mass)) throw SingularityError("coupling-mass quadrature is not finite");
  return mass;
}

}  // namespace binormal

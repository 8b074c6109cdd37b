#include "binormal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "binormal/errors.hpp"
#include "binormal/rng.hpp"

namespace binormal {

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("point dimension " + std::to_string(dim) + " outside [1, " +
                      std::to_string(kMaxDim) + "]");
  }
}

Point::Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from_span(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

Point& Point::operator+=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) noexcept {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) noexcept {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.c_[i] != b.c_[i]) return false;
  }
  return true;
}

double dot(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Point& a) noexcept { return dot(a, a); }
double norm(const Point& a) noexcept { return std::sqrt(norm2(a)); }

double distance(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

bool is_finite(const Point& p) noexcept {
  return std::all_of(p.coords().begin(), p.coords().end(), [](double v) { return std::isfinite(v); });
}

Point axis_point(int dim, int axis, double length) {
  Point p(dim);
  p[axis] = length;
  return p;
}

std::string to_string(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < p.dim(); ++i) {
    if (i) os << ',';
    os << p[i];
  }
  os << ')';
  return os.str();
}

Ball::Ball(Point center, double radius) : center_(center), radius_(radius) {
  if (center_.dim() < 2) throw DomainError("ball dimension must be at least 2");
  if (!is_finite(center_)) throw DomainError("ball center is not finite");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw DomainError("ball radius must be positive and finite");
  }
}

bool Ball::contains_strictly(const Point& p) const noexcept { return distance(p, center_) < radius_; }

bool Ball::on_sphere(const Point& p, double rel_tol) const noexcept {
  return std::abs(distance(p, center_) - radius_) <= rel_tol * radius_;
}

bool Ball::concentric_with(const Ball& other, double rel_tol) const noexcept {
  return dim() == other.dim() &&
         distance(center_, other.center_) <= rel_tol * std::max(radius_, other.radius_);
}

std::string to_string(const Ball& b) {
  std::ostringstream os;
  os.precision(17);
  os << "B(" << to_string(b.center()) << ", " << b.radius() << ")";
  return os.str();
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

GaussLegendre gauss_legendre(int count) {
  if (count < 1) throw DomainError("Gauss-Legendre node count must be positive");
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(count));
  gl.weights.resize(static_cast<std::size_t>(count));
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (count == 1) {
      x = 0.0;
      dp = 1.0;
    } else {
      dp = count * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(count - 1 - i);
    gl.nodes[lo] = -x;
    gl.nodes[hi] = x;
    gl.weights[lo] = w;
    gl.weights[hi] = w;
  }
  if (count % 2 == 1) gl.nodes[static_cast<std::size_t>(count / 2)] = 0.0;
  return gl;
}

namespace {

int smallest_odd_above(int order) { return order % 2 == 0 ? order + 1 : order + 2; }

}  // namespace

QuadratureRule sphere_quadrature(const Ball& ball, int order, int max_order) {
  if (order < 1) throw DomainError("quadrature order must be at least 1");
  if (order > max_order) {
    throw DomainError("quadrature order " + std::to_string(order) + " exceeds cap " +
                      std::to_string(max_order));
  }
  const int n = ball.dim();
  const Point& c = ball.center();
  const double R = ball.radius();
  QuadratureRule rule{ball, {}, {}, order};

  if (n == 2) {
    const int m = smallest_odd_above(order);
    rule.nodes.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / m;
      rule.nodes.push_back(c + Point{R * std::cos(phi), R * std::sin(phi)});
    }
    rule.weights.assign(static_cast<std::size_t>(m), 1.0 / m);
    return rule;
  }
  if (n == 3) {
    const GaussLegendre gl = gauss_legendre(order / 2 + 1);
    const int m = smallest_odd_above(order);
    rule.nodes.reserve(gl.nodes.size() * static_cast<std::size_t>(m));
    std::vector<double> cos_phi(static_cast<std::size_t>(m)), sin_phi(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / m;
      cos_phi[static_cast<std::size_t>(j)] = std::cos(phi);
      sin_phi[static_cast<std::size_t>(j)] = std::sin(phi);
    }
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double ct = gl.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
        rule.nodes.push_back(c + Point{R * st * cos_phi[j], R * st * sin_phi[j], R * ct});
        rule.weights.push_back(0.5 * gl.weights[i] / m);
      }
    }
    return rule;
  }
  throw UnsupportedError("deterministic sphere quadrature exists only for n = 2, 3 (got n = " +
                         std::to_string(n) + "); use mc_sphere_samples");
}

QuadratureRule circle_rule(const Ball& ball, int count, double phase) {
  if (ball.dim() != 2) throw UnsupportedError("circle_rule requires n = 2");
  if (count < 1) throw DomainError("circle_rule needs at least one node");
  QuadratureRule rule{ball, {}, {}, count - 1};
  rule.nodes.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double phi = phase + 2.0 * std::numbers::pi * j / count;
    rule.nodes.push_back(ball.center() + Point{ball.radius() * std::cos(phi), ball.radius() * std::sin(phi)});
  }
  rule.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return rule;
}

Point mc_sphere_sample(const Ball& ball, std::uint64_t seed, std::uint64_t index) {
  rng::Stream stream(seed, index);
  Point dir(ball.dim());
  double len2 = 0.0;
  while (len2 == 0.0) {
    for (int i = 0; i < ball.dim(); ++i) dir[i] = stream.normal();
    len2 = norm2(dir);
  }
  return ball.center() + dir * (ball.radius() / std::sqrt(len2));
}

std::vector<Point> mc_sphere_samples(const Ball& ball, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("mc_sphere_samples needs count >= 1");
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(mc_sphere_sample(ball, seed, i));
  return out;
}

namespace {

// Distance from an interior point along unit direction u to the sphere.
double exit_length(const Point& offset, double R2, const Point& u) {
  const double b = dot(u, offset);
  const double c = R2 - norm2(offset);
  if (c <= 0.0) return b < 0.0 ? -2.0 * b : 0.0;
  const double s = std::sqrt(b * b + c);
  return b >= 0.0 ? c / (b + s) : s - b;
}

}  // namespace

namespace {

// Polar rule about `origin`; each ray is split where it passes closest to one
// of `nearby` and where it crosses one of rule.interfaces.
double polar_with_breaks(const Ball& ball, const Point& origin, std::span<const Point> nearby,
                         const ScalarField& f, const VolumeRule& rule) {
  const int n = ball.dim();
  if (n != 2 && n != 3) throw UnsupportedError("volume quadrature is implemented for n = 2, 3");
  if (origin.dim() != n) throw DomainError("origin dimension does not match the ball");
  if (distance(origin, ball.center()) > ball.radius() * (1.0 + 1e-12)) {
    throw DomainError("polar origin " + to_string(origin) + " lies outside " + to_string(ball));
  }
  const QuadratureRule dirs = sphere_quadrature(Ball(Point(n), 1.0), rule.angular_order);
  const GaussLegendre gl = gauss_legendre(rule.radial_nodes);
  const Point offset = origin - ball.center();
  const double R2 = ball.radius() * ball.radius();

  std::vector<double> breaks;
  double total = 0.0;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const Point& u = dirs.nodes[d];
    const double t = exit_length(offset, R2, u);
    if (t <= 0.0) continue;
    breaks.assign(1, 0.0);
    for (const Point& q : nearby) {
      const double tau = dot(u, q - origin);
      if (tau > 0.0 && tau < t) breaks.push_back(tau);
    }
    for (const Ball& s : rule.interfaces) {
      const Point oc = origin - s.center();
      const double b = dot(u, oc);
      const double disc = b * b - (norm2(oc) - s.radius() * s.radius());
      if (disc <= 0.0) continue;
      const double root = std::sqrt(disc);
      for (const double tau : {-b - root, -b + root}) {
        if (tau > 1e-14 * ball.radius() && tau < t) breaks.push_back(tau);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(t);

    double ray = 0.0;
    // First piece: graded r = a s^3 absorbs the singularity at the origin.
    const double a = breaks[1];
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double s = 0.5 * (gl.nodes[k] + 1.0);
      const double s2 = s * s;
      const double r = a * s2 * s;
      ray += 0.5 * gl.weights[k] * 3.0 * a * s2 * std::pow(r, n - 1) * f(origin + u * r);
    }
    for (std::size_t piece = 1; piece + 1 < breaks.size(); ++piece) {
      const double lo = breaks[piece];
      const double hi = breaks[piece + 1];
      const double half = 0.5 * (hi - lo);
      if (half <= 0.0) continue;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double r = lo + half * (gl.nodes[k] + 1.0);
        ray += half * gl.weights[k] * std::pow(r, n - 1) * f(origin + u * r);
      }
    }
    total += dirs.weights[d] * ray;
  }
  return unit_sphere_area(n) * total;
}

}  // namespace

double integrate_ball_polar(const Ball& ball, const Point& origin, const ScalarField& f, const VolumeRule& rule) {
  return polar_with_breaks(ball, origin, {}, f, rule);
}

double integrate_ball_split(const Ball& ball, std::span<const Point> singular, const ScalarField& f,
                            const VolumeRule& rule) {
  std::vector<Point> pts;
  const double merge_tol = 1e-13 * ball.radius();
  for (const Point& s : singular) {
    if (!ball.contains_strictly(s)) continue;
    const bool dup = std::any_of(pts.begin(), pts.end(), [&](const Point& q) { return distance(q, s) <= merge_tol; });
    if (!dup) pts.push_back(s);
  }
  if (pts.empty()) return integrate_ball_polar(ball, ball.center(), f, rule);
  if (pts.size() == 1) return integrate_ball_polar(ball, pts.front(), f, rule);

  // Partition of unity: weight_k(z) = |z - s_k|^{-8} / sum_i |z - s_i|^{-8}.
  double total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto patch = [&](const Point& z) {
      const double dk = norm2(z - pts[k]);
      double denom = 0.0;
      for (const Point& s : pts) {
        const double di = norm2(z - s);
        if (di == 0.0) return 0.0;
        const double ratio = dk / di;
        const double r2 = ratio * ratio;
        denom += r2 * r2;
      }
      return f(z) / denom;
    };
    std::vector<Point> others;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != k) others.push_back(pts[i]);
    }
    total += polar_with_breaks(ball, pts[k], others, patch, rule);
  }
  return total;
}

}  // namespace binormal

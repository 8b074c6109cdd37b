#pragma once

// Points, balls and quadrature on spheres and balls in R^n.
//
// Surface integrals are always taken against the NORMALIZED surface measure
// of the sphere, so a rule's weights sum to one. Volume integrals use the
// Lebesgue measure.

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace binormal {

inline constexpr int kMaxDim = 8;

class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  static Point from_span(std::span<const double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  Point& operator+=(const Point& o) noexcept;
  Point& operator-=(const Point& o) noexcept;
  Point& operator*=(double s) noexcept;

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }
  friend bool operator==(const Point& a, const Point& b) noexcept;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double dot(const Point& a, const Point& b) noexcept;
double norm2(const Point& a) noexcept;
double norm(const Point& a) noexcept;
double distance(const Point& a, const Point& b) noexcept;
bool is_finite(const Point& p) noexcept;
/// `e_i` scaled by `length` in dimension `dim`.
Point axis_point(int dim, int axis, double length = 1.0);
std::string to_string(const Point& p);

/// Open ball / sphere B(center, radius) in R^n, n >= 2.
class Ball {
 public:
  Ball(Point center, double radius);

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return center_.dim(); }

  bool contains_strictly(const Point& p) const noexcept;
  bool on_sphere(const Point& p, double rel_tol = 1e-10) const noexcept;
  bool concentric_with(const Ball& other, double rel_tol = 1e-12) const noexcept;
  friend bool operator==(const Ball& a, const Ball& b) noexcept {
    return a.radius_ == b.radius_ && a.center_ == b.center_;
  }

 private:
  Point center_;
  double radius_;
};

std::string to_string(const Ball& b);

/// Surface area of the unit sphere S^{n-1}.
double unit_sphere_area(int n);
/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int count);

inline constexpr int kDefaultMaxQuadOrder = 2048;

struct QuadratureRule {
  Ball sphere;
  std::vector<Point> nodes;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Deterministic rule on the sphere of `ball`, exact for polynomials of total
/// degree <= order. n = 2: equal-angle nodes, n = 3: Gauss-Legendre in the
/// polar cosine times equal-angle azimuth.
QuadratureRule sphere_quadrature(const Ball& ball, int order, int max_order = kDefaultMaxQuadOrder);

/// `count` equally spaced nodes on a circle, starting at angle `phase`.
QuadratureRule circle_rule(const Ball& ball, int count, double phase = 0.0);

/// Uniform points on the sphere of `ball`. Sample i depends only on (seed, i).
std::vector<Point> mc_sphere_samples(const Ball& ball, std::size_t count, std::uint64_t seed);
Point mc_sphere_sample(const Ball& ball, std::uint64_t seed, std::uint64_t index);

using ScalarField = std::function<double(const Point&)>;

/// Resolution of the polar product rules used for volume integrals.
struct VolumeRule {
  int radial_nodes = 48;
  int angular_order = 48;
  /// Spheres across which the integrand has a kink; rays are split there.
  std::vector<Ball> interfaces{};
};

/// Integral of f over `ball` in polar coordinates about an interior `origin`.
/// The radial variable is graded (r = t s^3), which absorbs integrable
/// singularities of order |z - origin|^{2-n} and logarithmic ones at the origin.
double integrate_ball_polar(const Ball& ball, const Point& origin, const ScalarField& f,
                            const VolumeRule& rule = {});

/// Integral of f over `ball` when f is singular at each of `singular` (all in
/// the closed ball). Uses a partition of unity with one polar patch per point.
/// With no singular points this is the polar rule about the center.
double integrate_ball_split(const Ball& ball, std::span<const Point> singular, const ScalarField& f,
                            const VolumeRule& rule = {});

}  // namespace binormal

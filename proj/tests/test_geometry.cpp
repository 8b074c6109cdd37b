#include <cmath>
#include <random>

#include "binormal/errors.hpp"
#include "binormal/geometry.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace binormal;

namespace {

double rule_sum(const QuadratureRule& r, const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

// Random rotation of R^3 from a normalized quaternion.
std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  double q[4];
  double len = 0.0;
  for (double& v : q) {
    v = g(gen);
    len += v * v;
  }
  len = std::sqrt(len);
  for (double& v : q) v /= len;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

TEST_CASE("point arithmetic and validation") {
  const Point a{1.0, 2.0, 3.0};
  const Point b{0.5, -1.0, 2.0};
  CHECK(dot(a, b) == doctest::Approx(0.5 - 2.0 + 6.0));
  CHECK(distance(a, b) == doctest::Approx(std::sqrt(0.25 + 9.0 + 1.0)));
  CHECK((a - b) + b == a);
  CHECK(axis_point(3, 1, 2.5) == Point{0.0, 2.5, 0.0});
  CHECK_THROWS_AS(Point(0), DomainError);
  CHECK_THROWS_AS(Point(kMaxDim + 1), DomainError);
  CHECK_THROWS_AS(Ball(Point{0.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(Ball(Point{0.0, NAN}, 1.0), DomainError);
}

TEST_CASE("ball predicates") {
  const Ball b(Point{1.0, 1.0}, 2.0);
  CHECK(b.contains_strictly(Point{1.0, 2.9}));
  CHECK_FALSE(b.contains_strictly(Point{1.0, 3.0}));
  CHECK(b.on_sphere(Point{3.0, 1.0}));
  CHECK(b.concentric_with(Ball(Point{1.0, 1.0}, 5.0)));
  CHECK_FALSE(b.concentric_with(Ball(Point{1.0, 1.1}, 5.0)));
}

TEST_CASE("sphere areas") {
  for (int n = 2; n <= 8; ++n) CHECK(unit_sphere_area(n) == doctest::Approx(oracle::sphere_area(n)).epsilon(1e-14));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * oracle::kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * oracle::kPi / 3.0));
}

TEST_CASE("gauss-legendre exactness") {
  for (int count : {1, 2, 5, 16, 64}) {
    const GaussLegendre gl = gauss_legendre(count);
    for (int k = 0; k <= 2 * count - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), DomainError);
}

TEST_CASE("sphere rules reproduce even moments") {
  for (int n : {2, 3}) {
    const Ball unit(Point(n), 1.0);
    for (int a = 0; a <= 6; ++a) {
      const QuadratureRule r = sphere_quadrature(unit, std::max(1, 2 * a));
      const double s = rule_sum(r, [a](const Point& z) { return std::pow(z[0], 2 * a); });
      CHECK(s == doctest::Approx(oracle::even_moment(n, a)).epsilon(1e-14));
    }
    // Mixed moment z1^2 z2^2 = 1 / (n (n + 2)).
    const QuadratureRule r = sphere_quadrature(unit, 4);
    const double mixed = rule_sum(r, [](const Point& z) { return z[0] * z[0] * z[1] * z[1]; });
    CHECK(mixed == doctest::Approx(1.0 / (n * (n + 2.0))).epsilon(1e-14));
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("sphere rules on shifted balls") {
  const Ball b(Point{0.3, -1.0, 2.0}, 1.7);
  const QuadratureRule r = sphere_quadrature(b, 6);
  for (const Point& z : r.nodes) CHECK(b.on_sphere(z, 1e-14));
  // Average of |z - c|^2 (z_1 - c_1)^2 = R^4 / 3.
  const double s = rule_sum(r, [&](const Point& z) {
    const Point d = z - b.center();
    return norm2(d) * d[0] * d[0];
  });
  CHECK(s == doctest::Approx(std::pow(1.7, 4) / 3.0).epsilon(1e-13));
}

TEST_CASE("sphere rule is rotation covariant") {
  std::mt19937_64 gen(7);
  const Ball unit(Point(3), 1.0);
  const QuadratureRule r = sphere_quadrature(unit, 10);
  const auto f = [](const Point& z) {
    return z[0] * z[0] * z[0] * z[1] + 2.0 * z[2] * z[2] * z[2] * z[2] - z[0] * z[1] * z[2] + std::pow(z[1], 6);
  };
  const double base = rule_sum(r, f);
  for (int trial = 0; trial < 10; ++trial) {
    const auto Q = random_rotation(gen);
    const double rotated = rule_sum(r, [&](const Point& z) {
      Point y(3);
      for (int i = 0; i < 3; ++i) y[i] = Q[i][0] * z[0] + Q[i][1] * z[1] + Q[i][2] * z[2];
      return f(y);
    });
    CHECK(rotated == doctest::Approx(base).epsilon(1e-13));
  }
}

TEST_CASE("sphere rule limits") {
  CHECK_THROWS_AS(sphere_quadrature(Ball(Point(3), 1.0), 0), DomainError);
  CHECK_THROWS_AS(sphere_quadrature(Ball(Point(3), 1.0), 4096), DomainError);
  CHECK_THROWS_AS(sphere_quadrature(Ball(Point(4), 1.0), 8), UnsupportedError);
}

TEST_CASE("circle rule integrates trigonometric polynomials") {
  const Ball b(Point{0.0, 0.0}, 1.0);
  const QuadratureRule r = circle_rule(b, 9, 0.3);
  for (int k = 1; k < 9; ++k) {
    const double s = rule_sum(r, [k](const Point& z) { return std::cos(k * std::atan2(z[1], z[0])); });
    CHECK(std::abs(s) < 1e-14);
  }
  CHECK_THROWS_AS(circle_rule(Ball(Point(3), 1.0), 4), UnsupportedError);
}

TEST_CASE("monte carlo sphere samples are indexed") {
  const Ball b(Point{1.0, 0.0, 0.0}, 2.0);
  const auto all = mc_sphere_samples(b, 64, 11);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i] == mc_sphere_sample(b, 11, i));
    CHECK(b.on_sphere(all[i], 1e-14));
  }
  CHECK_FALSE(mc_sphere_sample(b, 12, 0) == all[0]);
  // Sample mean of z_1^2 about the center is near R^2 / 3.
  const auto many = mc_sphere_samples(b, 200000, 3);
  double s = 0.0;
  for (const Point& z : many) s += (z[0] - 1.0) * (z[0] - 1.0);
  CHECK(s / many.size() == doctest::Approx(4.0 / 3.0).epsilon(0.01));
}

TEST_CASE("polar ball integration") {
  const Ball b(Point{0.5, 0.0, -0.5}, 1.5);
  const double vol = integrate_ball_polar(b, Point{0.9, 0.2, -0.1}, [](const Point&) { return 1.0; }, {64, 64});
  CHECK(vol == doctest::Approx(4.0 * oracle::kPi / 3.0 * std::pow(1.5, 3)).epsilon(1e-10));
  // Green function of the unit disk about its center integrates to R^2 / 4.
  const Ball disk(Point{0.0, 0.0}, 1.0);
  const double m = integrate_ball_polar(disk, disk.center(), [](const Point& z) {
    return oracle::green_center(2, norm(z), 1.0);
  }, {48, 48});
  CHECK(m == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("split integration handles two poles") {
  const Ball b(Point(3), 1.0);
  const Point p{0.3, 0.0, 0.0}, q{-0.2, 0.4, 0.0};
  const std::array<Point, 2> poles{p, q};
  // Newtonian potential of the uniform ball at an interior point: (3 - r^2) / 6 per unit density.
  const double v = integrate_ball_split(b, poles, [&](const Point& z) {
    return oracle::newtonian(3, distance(z, p)) + oracle::newtonian(3, distance(z, q));
  }, {48, 48});
  const double exact = (3.0 - norm2(p)) / 6.0 + (3.0 - norm2(q)) / 6.0;
  CHECK(v == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("interface spheres resolve kinks") {
  // int max(0, rho^2 - |z - a|^2) dz = 8 pi rho^5 / 15.
  const Ball b(Point(3), 1.0);
  const Point a{0.3, 0.1, 0.0};
  const double rho = 0.35;
  const auto bump = [&](const Point& z) { return std::max(0.0, rho * rho - norm2(z - a)); };
  const double exact = 8.0 * oracle::kPi * std::pow(rho, 5) / 15.0;
  VolumeRule rule{32, 32};
  const double plain = integrate_ball_polar(b, b.center(), bump, rule);
  rule.interfaces.push_back(Ball(a, rho));
  const double split = integrate_ball_polar(b, b.center(), bump, rule);
  CHECK(split == doctest::Approx(exact).epsilon(1e-10));
  CHECK(std::abs(split - exact) < std::abs(plain - exact));
}

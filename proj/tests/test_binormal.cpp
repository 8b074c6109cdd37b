#include <cmath>
#include <random>

#include "binormal/binormal.hpp"
#include "binormal/errors.hpp"
#include "binormal/funczoo.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace binormal;

namespace {

TwoSphereConfig random_config(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point c(n);
  for (int i = 0; i < n; ++i) c[i] = 2.0 * u(gen) - 1.0;
  const double r1 = 0.3 + u(gen);
  const double r2 = r1 * (1.1 + 2.0 * u(gen));
  Point dir(n);
  for (int i = 0; i < n; ++i) dir[i] = u(gen) - 0.5;
  const Point x = c + dir * (0.9 * r1 * u(gen) / norm(dir));
  return TwoSphereConfig::make(c, r1, r2, x);
}

}  // namespace

TEST_CASE("coefficients") {
  const TwoSphereConfig center = TwoSphereConfig::make(Point(3), 1.0, 2.0, Point(3));
  const Coefficients c = coefficients(center);
  CHECK(c.alpha == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(c.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  std::mt19937_64 gen(1);
  for (int k = 0; k < 200; ++k) {
    const TwoSphereConfig cfg = random_config(gen, 2 + k % 2);
    const Coefficients q = coefficients(cfg);
    const double r1 = cfg.omega1.radius(), r2 = cfg.omega2.radius();
    CHECK(q.alpha - q.beta == 1.0);
    CHECK(q.alpha == doctest::Approx((r2 * r2 - q.rho * q.rho) / (r2 * r2 - r1 * r1)).epsilon(1e-14));
    CHECK(q.beta == doctest::Approx((r1 * r1 - q.rho * q.rho) / (r2 * r2 - r1 * r1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(TwoSphereConfig::make(Point(2), 2.0, 1.0, Point(2)), DomainError);
  CHECK_THROWS_AS(TwoSphereConfig::make(Point(2), 1.0, 2.0, Point{1.0, 0.0}), DomainError);
}

TEST_CASE("two-sphere measure annihilates biharmonic functions") {
  std::mt19937_64 gen(2);
  for (int n : {2, 3}) {
    const auto zoo = zoo_list(n, 4);
    for (int k = 0; k < 5; ++k) {
      const TwoSphereConfig cfg = random_config(gen, n);
      const SignedMeasure lambda = two_sphere_binormal(cfg);
      CHECK(std::abs(total_mass(lambda)) < 1e-14);
      for (const ZooMember& m : zoo) {
        if (!m.is_pair) continue;
        CAPTURE(m.name);
        CHECK(std::abs(mean_value_defect(m.u1, cfg)) < 1e-10);
      }
    }
  }
}

TEST_CASE("mean value defect of |z|^4") {
  // |z|^4 is constant on spheres about the origin, so the defect is
  // alpha R1^4 - beta R2^4 - |x|^4.
  const Polynomial f = parse_polynomial("|z|^4", 3);
  const TwoSphereConfig center = TwoSphereConfig::make(Point(3), 1.0, 2.0, Point(3));
  CHECK(mean_value_defect(f, center) == doctest::Approx(-4.0).epsilon(1e-12));
  const Point x{0.3, 0.2, -0.4};
  const TwoSphereConfig off = TwoSphereConfig::make(Point(3), 1.0, 2.0, x);
  const Coefficients c = coefficients(off);
  CHECK(mean_value_defect(f, off) == doctest::Approx(c.alpha - 16.0 * c.beta - std::pow(norm2(x), 2)).epsilon(1e-12));
}

TEST_CASE("default exterior grid") {
  for (int n : {2, 3}) {
    const CompactSupport K{Ball(axis_point(n, 0, 1.0), 2.0)};
    const auto grid = default_exterior_grid(K);
    CHECK(grid.size() == 108);
    int counts[3] = {0, 0, 0};
    for (const Point& p : grid) {
      CHECK(K.strictly_outside(p));
      const double r = distance(p, K.ball.center()) / 2.0;
      for (int s = 0; s < 3; ++s) {
        if (std::abs(r - std::array{1.2, 2.0, 5.0}[s]) < 1e-12) ++counts[s];
      }
    }
    CHECK(counts[0] == 36);
    CHECK(counts[1] == 36);
    CHECK(counts[2] == 36);
  }
  CHECK_THROWS_AS(default_exterior_grid(CompactSupport{Ball(Point(4), 1.0)}), UnsupportedError);
}

TEST_CASE("automatic quadrature order") {
  const SignedMeasure lambda = two_sphere_binormal(TwoSphereConfig::make(Point(3), 1.0, 2.0, Point(3)));
  CHECK(auto_quad_order(lambda) >= 32);
  const std::vector<Point> near{Point{2.4, 0.0, 0.0}};
  const std::vector<Point> far{Point{10.0, 0.0, 0.0}};
  const int a = auto_quad_order(lambda, near);
  const int b = auto_quad_order(lambda, far);
  CHECK(a > b);
  CHECK(a <= kDefaultMaxQuadOrder);
  // Off-center harmonic measures need more nodes than centered ones.
  const SignedMeasure off = SignedMeasure::harmonic(Ball(Point(3), 1.0), Point{0.9, 0.0, 0.0});
  CHECK(auto_quad_order(off) > auto_quad_order(SignedMeasure::harmonic(Ball(Point(3), 1.0), Point(3))));
}

TEST_CASE("pure binormality of the two-sphere measure") {
  std::mt19937_64 gen(3);
  for (int n : {2, 3}) {
    for (int k = 0; k < 3; ++k) {
      const TwoSphereConfig cfg = k == 0 ? TwoSphereConfig::make(Point(n), 1.0, 2.0, Point(n)) : random_config(gen, n);
      const CompactSupport K{cfg.omega2};
      const auto grid = default_exterior_grid(K);
      const VerificationReport r = verify_pure_binormal(two_sphere_binormal(cfg), K, grid);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(r.pass);
      CHECK(r.max_abs <= 1e-10);
      CHECK(r.residuals.size() == 2 * grid.size());
      CHECK(r.metadata.at("grid_size") == 108.0);
    }
  }
}

TEST_CASE("residual at the probe matches the mean-distance formula") {
  const TwoSphereConfig cfg = TwoSphereConfig::make(Point(3), 1.0, 2.0, Point(3));
  const std::vector<Point> probe{Point{3.0, 0.0, 0.0}};
  const VerificationReport r = verify_pure_binormal(two_sphere_binormal(cfg), CompactSupport{cfg.omega2}, probe);
  const double oracle_w = 3.0 - (4.0 / 3.0) * oracle::mean_distance_3d(3.0, 1.0) +
                          (1.0 / 3.0) * oracle::mean_distance_3d(3.0, 2.0);
  CHECK(std::abs(oracle_w) < 1e-15);
  CHECK(std::abs(r.max_abs_of("r_w")) <= 1e-10);
  CHECK_THROWS_AS(verify_pure_binormal(two_sphere_binormal(cfg), CompactSupport{cfg.omega2},
                                       std::vector<Point>{Point{1.0, 0.0, 0.0}}),
                  DomainError);
}

TEST_CASE("normal measure is not binormal") {
  const Ball omega(Point(3), 1.0);
  const CompactSupport K{omega};
  const SignedMeasure lambda0 = normal_measure(omega, Point(3));
  const std::vector<Point> probe{Point{3.0, 0.0, 0.0}};
  const VerificationReport pure = verify_pure_binormal(lambda0, K, probe);
  double rw = 0.0;
  for (const Residual& res : pure.residuals) {
    if (res.kind == "r_w") rw = res.value;
  }
  // |y| minus the mean distance over the unit sphere: 3 - (3 + 1/9).
  CHECK(rw == doctest::Approx(3.0 - oracle::mean_distance_3d(3.0, 1.0)).epsilon(1e-10));
  CHECK(rw == doctest::Approx(-1.0 / 9.0).epsilon(1e-10));
  CHECK_FALSE(pure.pass);
  const auto grid = default_exterior_grid(K);
  const VerificationReport normal = verify_2normal(lambda0, K, grid);
  CHECK(normal.pass);
  CHECK(normal.max_abs <= 1e-12);
  CHECK_FALSE(verify_pure_binormal(lambda0, K, grid).pass);
}

TEST_CASE("superposed binormal measures") {
  for (int n : {2, 3}) {
    const Point a = axis_point(n, 0, 0.5), b = axis_point(n, 1, -1.0);
    const SignedMeasure nu = SignedMeasure::dirac(a, 1.5) + SignedMeasure::dirac(b, -0.75);
    const std::vector<AtomSpheres> spheres{{a, 0.5, 1.0}, {b, 0.4, 1.2}};
    const SignedMeasure lambda = superposed_binormal(nu, spheres);
    const CompactSupport K{Ball(Point(n), 3.0)};
    const VerificationReport r = verify_pure_binormal(lambda, K, default_exterior_grid(K));
    CAPTURE(n);
    CHECK(r.pass);
    CHECK(std::abs(total_mass(lambda)) < 1e-14);
  }
}

TEST_CASE("polynomial test functions") {
  for (int n : {2, 3}) {
    const auto tests = polynomial_test_functions(n);
    CHECK(tests.size() == 10);
    CHECK(tests.front().f(axis_point(n, 0, 5.0)) == 1.0);
  }
}

TEST_CASE("sweep decomposition") {
  std::mt19937_64 gen(4);
  for (int n : {2, 3}) {
    for (int k = 0; k < 3; ++k) {
      const TwoSphereConfig cfg = k == 0 ? TwoSphereConfig::make(Point(n), 1.0, 2.0, Point(n)) : random_config(gen, n);
      const VerificationReport r = verify_sweep_decomposition(cfg);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(r.pass);
      CHECK(r.max_abs <= 1e-10);
      CHECK(r.metadata.count("alpha") == 1);
    }
  }
  // A mismatched sweep is detected.
  const Ball omega(Point(2), 1.0);
  const Point x{0.2, 0.1};
  const auto tests = polynomial_test_functions(2);
  const VerificationReport bad = verify_sweep_identity(SignedMeasure::dirac(x), SignedMeasure::harmonic(omega, Point(2), -1.0),
                                                       CompactSupport{omega}, tests);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("generator expansion") {
  const TwoSphereConfig cfg = TwoSphereConfig::make(Point(2), 1.0, 2.0, Point{0.3, -0.2});
  const GeneratorExpansion g = generator_expansion(cfg, 64);
  CHECK(g.report.pass);
  CHECK(g.report.max_abs <= 1e-10);
  CHECK(std::abs(total_mass(g.lambda_m)) < 1e-13);
  CHECK_THROWS_AS(generator_expansion(cfg, 1), DomainError);
  CHECK(min_generator_atoms(2) == 2);
  CHECK(min_generator_atoms(3) == 3);

  const TwoSphereConfig cfg3 = TwoSphereConfig::make(Point(3), 1.0, 2.0, Point{0.1, 0.0, 0.2});
  const GeneratorExpansion g3 = generator_expansion(cfg3, 200);
  CHECK(g3.report.pass);
}

TEST_CASE("choquet-deny density") {
  const Ball E(Point(3), 1.0);
  const SignedMeasure lambda = normal_measure(E, Point(3));
  for (const KernelId& kernel : {KernelId::newtonian(3), KernelId::ball_green(E)}) {
    const SignedMeasure prime = choquet_deny_prime(lambda, E, kernel);
    const auto& vd = std::get<VolumeDensity>(prime.terms().front().component);
    // Both kernels give G_E(., 0) = (1/r - 1) / (4 pi).
    CHECK(vd.density(Point{0.5, 0.0, 0.0}) == doctest::Approx(1.0 / (4.0 * oracle::kPi)).epsilon(1e-12));
    CHECK(vd.density(Point{0.0, 0.0, 0.25}) == doctest::Approx(3.0 / (4.0 * oracle::kPi)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(choquet_deny_prime(SignedMeasure::dirac(Point{2.0, 0.0, 0.0}), E, KernelId::newtonian(3)),
                  DomainError);
  CHECK_THROWS_AS(choquet_deny_prime(lambda, E, KernelId::biharm_fundamental(3)), UnsupportedError);
}

TEST_CASE("choquet-deny fubini identity with inner spheres") {
  // Harmonic measures on balls strictly inside E make the two sides of the
  // identity go through different quadratures.
  const Ball E(Point(3), 1.0);
  const Point a{0.4, 0.1, 0.0};
  const SignedMeasure lambda = SignedMeasure::dirac(a) - SignedMeasure::harmonic(Ball(a, 0.2), a);
  const std::vector<Point> pts{Point{0.0, -0.6, 0.0}, Point{-0.4, 0.2, 0.1}};
  const VerificationReport r = verify_choquet_deny_fubini(lambda, E, pts);
  CHECK(r.pass);
  CHECK(r.max_abs <= 1e-6);
  CHECK_THROWS_AS(verify_choquet_deny_fubini(lambda, E, std::vector<Point>{Point{1.0, 0.0, 0.0}}), DomainError);
}

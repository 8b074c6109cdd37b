#pragma once

// Finite signed measures built from atoms, harmonic measures of balls and
// densities on spheres and balls, with integration, potentials and harmonic
// balayage onto the complement of a closed ball.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "binormal/geometry.hpp"
#include "binormal/kernels.hpp"
#include "binormal/simd/kernel_sum.hpp"

namespace binormal {

struct PointMass {
  Point location;
};

/// Harmonic measure of `ball` seen from `base` (strictly inside).
struct HarmonicMeasure {
  Ball ball;
  Point base;
};

/// density * (normalized surface measure of the sphere of `sphere`).
struct SurfaceDensity {
  Ball sphere;
  ScalarField density;
  double mass = 0.0;
};

/// density * (Lebesgue measure restricted to `ball`). `singular_points` are
/// interior points where the density may blow up (integrably); volume
/// quadrature splits around them.
struct VolumeDensity {
  Ball ball;
  ScalarField density;
  std::vector<Point> singular_points;
  double mass = 0.0;
  /// Spheres where the density has a kink (see VolumeRule::interfaces).
  std::vector<Ball> interfaces{};
};

using MeasureComponent = std::variant<PointMass, HarmonicMeasure, SurfaceDensity, VolumeDensity>;

struct Term {
  double weight = 0.0;
  MeasureComponent component;
};

int component_dim(const MeasureComponent& c);
double component_mass(const MeasureComponent& c);
std::string describe(const MeasureComponent& c);

class SignedMeasure {
 public:
  SignedMeasure() = default;
  explicit SignedMeasure(std::vector<Term> terms);

  static SignedMeasure dirac(const Point& location, double weight = 1.0);
  static SignedMeasure harmonic(const Ball& ball, const Point& base, double weight = 1.0);
  static SignedMeasure surface(const Ball& sphere, ScalarField density, int quad_order = 64, double weight = 1.0);
  static SignedMeasure volume(const Ball& ball, ScalarField density, std::vector<Point> singular_points = {},
                              const VolumeRule& rule = {}, double weight = 1.0);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  /// 0 for the empty measure.
  int dim() const noexcept { return dim_; }

  SignedMeasure& operator+=(const SignedMeasure& other);
  SignedMeasure& operator*=(double s);
  friend SignedMeasure operator+(SignedMeasure a, const SignedMeasure& b) { return a += b; }
  friend SignedMeasure operator-(SignedMeasure a, const SignedMeasure& b) { return a += b * -1.0; }
  friend SignedMeasure operator*(SignedMeasure a, double s) { return a *= s; }
  friend SignedMeasure operator*(double s, SignedMeasure a) { return a *= s; }

  /// Terms with positive (resp. negative, negated) weight: m = positive - negative.
  SignedMeasure positive_part() const;
  SignedMeasure negative_part() const;
  double total_variation() const;

  /// Merges terms over identical atoms and identical harmonic measures and
  /// drops terms whose merged weight has magnitude <= drop_below.
  SignedMeasure combined(double drop_below = 0.0) const;

 private:
  std::vector<Term> terms_;
  int dim_ = 0;
};

std::string describe(const SignedMeasure& m);

/// Closed ball K carrying a measure.
struct CompactSupport {
  Ball ball;

  bool contains(const Point& p, double rel_tol = 1e-12) const noexcept;
  /// True when p is outside K by more than the tolerance.
  bool strictly_outside(const Point& p, double rel_tol = 1e-12) const noexcept;
};

bool supported_in(const SignedMeasure& m, const CompactSupport& K);

struct McOptions {
  std::size_t count = 100000;
  std::uint64_t seed = 0;
};

struct IntegrationOptions {
  int quad_order = 32;
  /// Used for spheres in n >= 4, where no deterministic rule exists.
  McOptions mc{};
  VolumeRule volume{};
  /// Extra points where the integrand is singular (volume terms only).
  std::vector<Point> extra_singular{};
};

/// d(harmonic measure)/d(normalized surface measure) at boundary point z:
/// (R^2 - |x - c|^2) R^{n-2} / |x - z|^n.
double poisson_density(const Ball& ball, const Point& base, const Point& boundary_point);

double integrate(const SignedMeasure& m, const ScalarField& f, const IntegrationOptions& opts = {});
/// Exact from component masses; no quadrature.
double total_mass(const SignedMeasure& m);

/// Weighted node cloud equivalent to `m` under the given rule (atoms and
/// sphere terms only).
simd::NodeCloud discretize(const SignedMeasure& m, const IntegrationOptions& opts = {});

/// y -> int K(y, z) dm(z), prepared once for many evaluation points.
class PotentialEvaluator {
 public:
  PotentialEvaluator(SignedMeasure m, KernelId kernel, IntegrationOptions opts = {});
  double operator()(const Point& y) const;

 private:
  SignedMeasure measure_;
  KernelId kernel_;
  IntegrationOptions opts_;
  std::optional<simd::RadialProfile> profile_;
  std::optional<simd::NodeCloud> cloud_;
};

double potential(const SignedMeasure& m, const KernelId& kernel, const Point& y, const IntegrationOptions& opts = {});

/// int K(y, z) d mu^B_b(z) in closed form, valid for every y (n = 2, 3):
///   newtonian:          G1(y, b) - G_B(y, b) inside B, G1(y, b) outside
///   ball-green on E:    G_E(y, b) - G_B(y, b) inside B, G_E(y, b) outside,
///                       for closed B inside closed E.
/// Throws UnsupportedError for other kernels or configurations.
double harmonic_measure_potential(const HarmonicMeasure& h, const KernelId& kernel, const Point& y);

/// First component of the balayage of m onto the complement of K, for atoms
/// and concentric spheres. Components in general position are rejected.
SignedMeasure sweep_harmonic(const SignedMeasure& m, const CompactSupport& K, int quad_order = 64);

/// nu(1) for the harmonic-measure coupling of the Riquier problem on `ball`
/// at x: int_B G_B(x, y) dy.
double riquier_coupling_mass(const Ball& ball, const Point& x, int quad_order = 32);

}  // namespace binormal

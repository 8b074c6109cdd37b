#pragma once

// Binormal measures over concentric balls and the verifiers that certify
// them: potential criteria off a compact ball, harmonic sweeps, and the
// generator expansion.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "binormal/geometry.hpp"
#include "binormal/measures.hpp"

namespace binormal {

/// Point x inside omega1, with omega1 inside the concentric omega2.
struct TwoSphereConfig {
  Point x;
  Ball omega1;
  Ball omega2;

  static TwoSphereConfig make(const Point& center, double r1, double r2, const Point& x);
  int dim() const noexcept { return x.dim(); }
  /// Throws DomainError unless the balls are concentric, r1 < r2 and x lies in omega1.
  void validate() const;
};

struct Coefficients {
  double alpha = 1.0;
  double beta = 0.0;
  double rho = 0.0;
};

/// alpha = (R2^2 - rho^2) / (R2^2 - R1^2), beta = alpha - 1.
Coefficients coefficients(const TwoSphereConfig& cfg);

/// eps_x - alpha mu^{omega1}_x + beta mu^{omega2}_x.
SignedMeasure two_sphere_binormal(const TwoSphereConfig& cfg);

/// eps_x - mu^omega_x: annihilates harmonic functions but not biharmonic ones.
SignedMeasure normal_measure(const Ball& omega, const Point& x);

struct AtomSpheres {
  Point center;
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Sum over atoms w eps_x of w * two_sphere_binormal(center, r1, r2, x).
/// `nu` must consist of atoms only; spheres[i] belongs to the i-th term.
SignedMeasure superposed_binormal(const SignedMeasure& nu, std::span<const AtomSpheres> spheres);

/// d lambda' = U^lambda d tau on E, where U uses the newtonian kernel or the
/// ball Green function of E. Harmonic-measure terms of lambda enter through
/// their closed-form potentials.
SignedMeasure choquet_deny_prime(const SignedMeasure& lambda, const Ball& E, const KernelId& kernel,
                                 int quad_order = 64);

struct Residual {
  std::string label;
  std::string kind;
  double value = 0.0;
  std::vector<double> point;
};

struct VerificationReport {
  std::string name;
  std::vector<Residual> residuals;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::map<std::string, double> metadata;

  /// Recomputes max_abs, mean_abs and pass from the residuals.
  void finalize();
  /// Largest |value| among residuals of the given kind (0 if none).
  double max_abs_of(const std::string& kind) const;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// Three shells of radius 1.2, 2 and 5 times K's radius with 36 points each
/// (equal angles for n = 2, a Fibonacci lattice for n = 3).
std::vector<Point> default_exterior_grid(const CompactSupport& K);

/// Smallest quadrature order whose expected error for the sphere terms of m,
/// seen from the given points, is below `target`, clamped to [32, cap].
int auto_quad_order(const SignedMeasure& m, std::span<const Point> points = {}, int cap = kDefaultMaxQuadOrder,
                    double target = 1e-16);

/// Residuals r_w(y) = int w(., y) d lambda and r_p(y) = int G1(., y) d lambda on
/// the grid. quad_order <= 0 selects auto_quad_order.
VerificationReport verify_pure_binormal(const SignedMeasure& lambda, const CompactSupport& K,
                                        std::span<const Point> grid, int quad_order = 0,
                                        double tolerance = kDefaultTolerance);

/// Residual r_p(y) = int G1(., y) d mu only.
VerificationReport verify_2normal(const SignedMeasure& mu, const CompactSupport& K, std::span<const Point> grid,
                                  int quad_order = 0, double tolerance = kDefaultTolerance);

struct NamedField {
  std::string name;
  ScalarField f;
};

/// Ten fixed polynomials of degree <= 6 in n variables.
std::vector<NamedField> polynomial_test_functions(int n);

/// Checks sweep_harmonic(xi, K) = -sigma weakly on the test functions and
/// symbolically (total variation of the combined difference).
VerificationReport verify_sweep_identity(const SignedMeasure& xi, const SignedMeasure& sigma, const CompactSupport& K,
                                         std::span<const NamedField> tests, double tolerance = kDefaultTolerance);

/// xi = eps_x - alpha mu^{omega1}_x, sigma = beta mu^{omega2}_x, K = closed omega2.
VerificationReport verify_sweep_decomposition(const TwoSphereConfig& cfg, double tolerance = kDefaultTolerance);

struct GeneratorExpansion {
  SignedMeasure lambda_m;
  VerificationReport report;
};

/// Minimum atom count for generator_expansion in dimension n.
int min_generator_atoms(int n);

/// lambda_m = (eps_x - mu^{omega2}_x) - alpha sum_j w_j (eps_{z_j} - mu^{omega2}_{z_j})
/// with (z_j, w_j) an m-node rule for mu^{omega1}_x. The report holds
/// int f d lambda_m - int f d lambda per test function (polynomials by default).
GeneratorExpansion generator_expansion(const TwoSphereConfig& cfg, int m, std::span<const NamedField> tests = {},
                                       double tolerance = kDefaultTolerance);

/// With the ball Green function of E as kernel: residuals
/// U^{lambda'}(y) - int G2,E(y, z) d lambda(z) at each interior point y.
VerificationReport verify_choquet_deny_fubini(const SignedMeasure& lambda, const Ball& E, std::span<const Point> points,
                                              double tolerance = 1e-6);

/// alpha int f d mu^{omega1}_x - beta int f d mu^{omega2}_x - f(x), i.e.
/// -int f d lambda. Zero for biharmonic f. quad_order <= 0 selects the auto order.
double mean_value_defect(const ScalarField& f, const TwoSphereConfig& cfg, int quad_order = 0);

}  // namespace binormal

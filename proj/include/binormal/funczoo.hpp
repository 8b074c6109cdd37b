#pragma once

// Exact multivariate polynomials over the rationals, harmonic bases,
// Almansi-built biharmonic pairs, and the shrinking-ball estimator Gamma_1.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "binormal/geometry.hpp"

namespace binormal {

using Rational = boost::multiprecision::cpp_rational;
using Exponent = std::array<std::uint8_t, kMaxDim>;

class Polynomial {
 public:
  explicit Polynomial(int dim);

  static Polynomial constant(int dim, const Rational& c);
  /// z_{index+1}
  static Polynomial variable(int dim, int index);
  static Polynomial monomial(int dim, const Exponent& e, const Rational& c = 1);
  static Polynomial norm_squared(int dim);

  int dim() const noexcept { return dim_; }
  /// -1 for the zero polynomial.
  int degree() const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<Exponent, Rational>& terms() const noexcept { return terms_; }

  Polynomial derivative(int index) const;
  /// Laplacian in the first `vars` variables (all when vars < 0).
  Polynomial laplacian(int vars = -1) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

  /// Floating-point evaluation from cached double coefficients.
  double operator()(const Point& z) const;
  Rational evaluate_exact(std::span<const Rational> z) const;

  std::string to_string() const;

 private:
  void add_term(const Exponent& e, const Rational& c);
  void refresh_cache();

  int dim_;
  std::map<Exponent, Rational> terms_;
  std::vector<std::pair<double, Exponent>> cache_;
  int max_power_ = 0;
};

Polynomial laplacian(const Polynomial& p);

/// (u1, u2) with Delta u1 = -u2 and Delta u2 = 0 exactly.
struct BiharmonicPair {
  Polynomial u1;
  Polynomial u2;
};

/// u1 = q + |z|^2 h,  u2 = -Delta u1 = -(2n h + 4 <z, grad h>).
BiharmonicPair almansi_pair(const Polynomial& h, const Polynomial& q);
bool is_biharmonic_pair(const BiharmonicPair& p);

inline constexpr int kMaxHarmonicDegree = 8;

/// Basis of the homogeneous harmonic polynomials of degree k.
std::vector<Polynomial> harmonic_basis_degree(int n, int k);
/// All basis elements of degree 0..max_degree, grouped by degree.
std::vector<Polynomial> harmonic_basis(int n, int max_degree);

/// Parses expressions such as "z1^2 - z2^2", "3/2*z1*z3", "|z|^4 + 1" or
/// "(z1 + z2)^3".
Polynomial parse_polynomial(std::string_view expr, int dim);

/// Named test functions: "harmonic:deg=K,idx=I", "almansi:h=<expr>,q=<expr>",
/// "poly:<expr>". u2 is always -Delta u1; `is_pair` records Delta u2 == 0.
struct ZooMember {
  std::string name;
  Polynomial u1;
  Polynomial u2;
  bool is_pair = false;
};

ZooMember zoo_lookup(std::string_view name, int dim);
std::vector<ZooMember> zoo_list(int dim, int max_degree);

struct Gamma1Estimate {
  double value = 0.0;
  std::vector<double> radii;
  /// (f(x) - int f d mu^B(x,R)_x) / nu^B(x,R)_x(1) per radius.
  std::vector<double> quotients;
};

/// Shrinking-ball quotient extrapolated to R -> 0 from the two smallest radii
/// under an O(R^2) error model (weights -1/3, 4/3 when they halve).
Gamma1Estimate gamma1_estimate(const ScalarField& f, const Point& x, std::span<const double> radii,
                               int quad_order = 32);

}  // namespace binormal

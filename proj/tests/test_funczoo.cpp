#include <cmath>
#include <random>

#include "binormal/errors.hpp"
#include "binormal/funczoo.hpp"
#include "doctest.h"

using namespace binormal;

namespace {

// Binomial coefficient as a double.
double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Dimension of the homogeneous harmonic polynomials of degree k in R^n.
int harmonic_dim(int n, int k) {
  return static_cast<int>(choose(n + k - 1, n - 1) - choose(n + k - 3, n - 1));
}

Point random_point(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = u(gen);
  return p;
}

// Rank of a set of polynomials via Gaussian elimination on their coefficients.
int rank_of(const std::vector<Polynomial>& ps) {
  std::map<Exponent, int> column;
  for (const auto& p : ps) {
    for (const auto& [e, c] : p.terms()) column.emplace(e, static_cast<int>(column.size()));
  }
  std::vector<std::vector<Rational>> rows;
  for (const auto& p : ps) {
    std::vector<Rational> row(column.size());
    for (const auto& [e, c] : p.terms()) row[static_cast<std::size_t>(column[e])] = c;
    rows.push_back(row);
  }
  int rank = 0;
  for (std::size_t col = 0; col < column.size() && rank < static_cast<int>(rows.size()); ++col) {
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || rows[r][col] == 0) continue;
      const Rational f = rows[r][col] / rows[static_cast<std::size_t>(rank)][col];
      for (std::size_t c = 0; c < column.size(); ++c) rows[r][c] -= f * rows[static_cast<std::size_t>(rank)][c];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  const Polynomial z1 = Polynomial::variable(2, 0);
  const Polynomial z2 = Polynomial::variable(2, 1);
  const Polynomial p = z1 * z1 - z2 * z2;
  CHECK(p.degree() == 2);
  CHECK(p.laplacian().is_zero());
  CHECK(p.to_string() == "z1^2 - z2^2");
  CHECK(p(Point{2.0, 0.5}) == doctest::Approx(3.75));
  CHECK(Polynomial::norm_squared(3).laplacian() == Polynomial::constant(3, 6));
  CHECK(p.derivative(1) == z2 * Rational(-2));
  CHECK(Polynomial(2).degree() == -1);
  CHECK((p - p).is_zero());
  CHECK_THROWS_AS(Polynomial::variable(2, 2), DomainError);
  CHECK_THROWS_AS(p + Polynomial::variable(3, 0), DomainError);
}

TEST_CASE("exact evaluation") {
  const Polynomial p = parse_polynomial("3/2*z1*z2 - 1/3", 2);
  const std::vector<Rational> z{Rational(2, 3), Rational(1, 5)};
  CHECK(p.evaluate_exact(z) == Rational(3, 2) * Rational(2, 15) - Rational(1, 3));
}

TEST_CASE("parser") {
  CHECK(parse_polynomial("|z|^4", 2) == Polynomial::norm_squared(2) * Polynomial::norm_squared(2));
  CHECK(parse_polynomial("(z1 + z2)^2", 2) == parse_polynomial("z1^2 + 2*z1*z2 + z2^2", 2));
  CHECK(parse_polynomial("2z1z2", 2) == parse_polynomial("2*z1*z2", 2));
  CHECK(parse_polynomial("-z1 + -(z2)", 2) == parse_polynomial("-(z1 + z2)", 2));
  CHECK(parse_polynomial("z1*z2^2 + 1/2*z1", 2).to_string() == "z1*z2^2 + 1/2*z1");
  for (const char* bad : {"z3", "|z|^3", "z1^", "(z1", "z1 +", "1/0", "x1", ""}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_polynomial(bad, 2), DomainError);
  }
}

TEST_CASE("printing round trips through the parser") {
  std::mt19937_64 gen(4);
  for (int n : {2, 3}) {
    for (const Polynomial& h : harmonic_basis(n, 5)) {
      CHECK(parse_polynomial(h.to_string(), n) == h);
    }
  }
}

TEST_CASE("harmonic bases have the right size and are harmonic") {
  for (int n : {2, 3, 4}) {
    for (int k = 0; k <= (n == 4 ? 5 : kMaxHarmonicDegree); ++k) {
      const auto basis = harmonic_basis_degree(n, k);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(static_cast<int>(basis.size()) == harmonic_dim(n, k));
      CHECK(rank_of(basis) == harmonic_dim(n, k));
      for (const Polynomial& h : basis) {
        CHECK(h.laplacian().is_zero());
        CHECK(h.degree() == k);
      }
    }
  }
  CHECK_THROWS_AS(harmonic_basis_degree(2, kMaxHarmonicDegree + 1), DomainError);
}

TEST_CASE("almansi pairs") {
  std::mt19937_64 gen(5);
  for (int n : {2, 3}) {
    const auto basis = harmonic_basis(n, 4);
    for (std::size_t i = 0; i < basis.size(); i += 3) {
      const Polynomial& h = basis[i];
      const Polynomial& q = basis[(i * 7 + 1) % basis.size()];
      const BiharmonicPair pr = almansi_pair(h, q);
      CHECK(is_biharmonic_pair(pr));
      CHECK(pr.u1.laplacian() == pr.u2 * Rational(-1));
      CHECK(pr.u2.laplacian().is_zero());
      // u2 = -(2n h + 4 <z, grad h>) = -(2n + 4k) h for homogeneous h of degree k.
      CHECK(pr.u2 == h * Rational(-(2 * n + 4 * std::max(h.degree(), 0))));
      const Point z = random_point(gen, n);
      CHECK(pr.u1(z) == doctest::Approx(q(z) + norm2(z) * h(z)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(almansi_pair(Polynomial::norm_squared(2), Polynomial(2)), DomainError);
  CHECK_THROWS_AS(almansi_pair(Polynomial(2), Polynomial::norm_squared(2)), DomainError);
  CHECK_FALSE(is_biharmonic_pair({Polynomial::norm_squared(2) * Polynomial::norm_squared(2), Polynomial(2)}));
}

TEST_CASE("zoo lookup") {
  const ZooMember a = zoo_lookup("harmonic:deg=2,idx=0", 2);
  CHECK(a.is_pair);
  CHECK(a.u2.is_zero());
  const ZooMember b = zoo_lookup("almansi:h=z1,q=z1^2 - z2^2", 2);
  CHECK(b.is_pair);
  CHECK(b.u1 == parse_polynomial("z1^3 + z1*z2^2 + z1^2 - z2^2", 2));
  CHECK(b.u2 == parse_polynomial("-8*z1", 2));
  const ZooMember c = zoo_lookup("poly:|z|^4", 3);
  CHECK(c.u2 == parse_polynomial("-20*|z|^2", 3));
  CHECK_FALSE(c.is_pair);
  const ZooMember d = zoo_lookup("poly:|z|^2", 3);
  CHECK(d.is_pair);
  CHECK(d.u2 == Polynomial::constant(3, -6));
  CHECK_THROWS_AS(zoo_lookup("harmonic:deg=2,idx=9", 2), DomainError);
  CHECK_THROWS_AS(zoo_lookup("harmonic:idx=0", 2), DomainError);
  CHECK_THROWS_AS(zoo_lookup("z1", 2), DomainError);
  CHECK_THROWS_AS(zoo_lookup("sine:z1", 2), DomainError);
  CHECK_THROWS_AS(zoo_lookup("almansi:h=|z|^2,q=0", 2), DomainError);

  const auto list = zoo_list(3, 3);
  CHECK(!list.empty());
  for (const ZooMember& m : list) {
    CHECK(m.u1.laplacian() == m.u2 * Rational(-1));
    CHECK(m.is_pair == m.u2.laplacian().is_zero());
    const ZooMember again = zoo_lookup(m.name, 3);
    CHECK(again.u1 == m.u1);
  }
}

TEST_CASE("gamma1 recovers the second component") {
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  for (int n : {2, 3}) {
    const Point x = axis_point(n, 0, 0.3) + axis_point(n, 1, -0.2);
    const auto sq = [&](const Point& z) { return norm2(z - x); };
    const Gamma1Estimate g = gamma1_estimate(sq, x, radii);
    CHECK(g.value == doctest::Approx(-2.0 * n).epsilon(1e-6));
    CHECK(g.quotients.size() == radii.size());
    const ZooMember h = zoo_lookup("harmonic:deg=3,idx=1", n);
    CHECK(std::abs(gamma1_estimate(h.u1, x, radii).value) < 1e-8);
    // For a biharmonic pair the limit is u2(x) = -Delta u1(x).
    const ZooMember p = zoo_lookup(n == 2 ? "almansi:h=z1,q=z2" : "almansi:h=z1*z2,q=z3", n);
    CHECK(gamma1_estimate(p.u1, x, radii).value == doctest::Approx(p.u2(x)).epsilon(1e-6));
  }
  const auto f = [](const Point& z) { return z[0]; };
  CHECK_THROWS_AS(gamma1_estimate(f, Point(2), std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(gamma1_estimate(f, Point(2), std::vector<double>{0.1, 0.2}), DomainError);
  CHECK_THROWS_AS(gamma1_estimate(f, Point(2), std::vector<double>{0.1, -0.2}), DomainError);
}

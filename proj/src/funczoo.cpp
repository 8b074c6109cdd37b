#include "binormal/funczoo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "binormal/errors.hpp"
#include "binormal/measures.hpp"

namespace binormal {

namespace {

int exponent_degree(const Exponent& e, int dim) {
  int d = 0;
  for (int i = 0; i < dim; ++i) d += e[static_cast<std::size_t>(i)];
  return d;
}

}  // namespace

Polynomial::Polynomial(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("polynomial dimension out of range");
}

Polynomial Polynomial::constant(int dim, const Rational& c) { return monomial(dim, Exponent{}, c); }

Polynomial Polynomial::variable(int dim, int index) {
  if (index < 0 || index >= dim) throw DomainError("variable index out of range");
  Exponent e{};
  e[static_cast<std::size_t>(index)] = 1;
  return monomial(dim, e);
}

Polynomial Polynomial::monomial(int dim, const Exponent& e, const Rational& c) {
  Polynomial p(dim);
  p.add_term(e, c);
  p.refresh_cache();
  return p;
}

Polynomial Polynomial::norm_squared(int dim) {
  Polynomial p(dim);
  for (int i = 0; i < dim; ++i) {
    Exponent e{};
    e[static_cast<std::size_t>(i)] = 2;
    p.add_term(e, 1);
  }
  p.refresh_cache();
  return p;
}

int Polynomial::degree() const noexcept {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, exponent_degree(e, dim_));
  return d;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::refresh_cache() {
  cache_.clear();
  max_power_ = 0;
  for (const auto& [e, c] : terms_) {
    cache_.emplace_back(static_cast<double>(c), e);
    for (int i = 0; i < dim_; ++i) max_power_ = std::max(max_power_, static_cast<int>(e[static_cast<std::size_t>(i)]));
  }
}

Polynomial Polynomial::derivative(int index) const {
  if (index < 0 || index >= dim_) throw DomainError("derivative index out of range");
  const auto k = static_cast<std::size_t>(index);
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponent d = e;
    d[k] = static_cast<std::uint8_t>(e[k] - 1);
    out.add_term(d, c * static_cast<int>(e[k]));
  }
  out.refresh_cache();
  return out;
}

Polynomial Polynomial::laplacian(int vars) const {
  const int m = vars < 0 ? dim_ : vars;
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (e[k] < 2) continue;
      Exponent d = e;
      d[k] = static_cast<std::uint8_t>(e[k] - 2);
      out.add_term(d, c * (static_cast<int>(e[k]) * (static_cast<int>(e[k]) - 1)));
    }
  }
  out.refresh_cache();
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.dim_ != dim_) throw DomainError("polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  refresh_cache();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.dim_ != dim_) throw DomainError("polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  refresh_cache();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
  } else {
    for (auto& [e, c] : terms_) c *= s;
  }
  refresh_cache();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.dim_ != b.dim_) throw DomainError("polynomial dimension mismatch");
  Polynomial out(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e{};
      for (std::size_t i = 0; i < e.size(); ++i) {
        const int s = ea[i] + eb[i];
        if (s > 255) throw DomainError("polynomial exponent overflow");
        e[i] = static_cast<std::uint8_t>(s);
      }
      out.add_term(e, ca * cb);
    }
  }
  out.refresh_cache();
  return out;
}

double Polynomial::operator()(const Point& z) const {
  if (z.dim() != dim_) throw DomainError("polynomial evaluated at a point of the wrong dimension");
  std::array<std::array<double, 33>, kMaxDim> pw{};
  const int top = std::min(max_power_, 32);
  for (int i = 0; i < dim_; ++i) {
    auto& row = pw[static_cast<std::size_t>(i)];
    row[0] = 1.0;
    for (int k = 1; k <= top; ++k) row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - 1)] * z[i];
  }
  double s = 0.0;
  for (const auto& [c, e] : cache_) {
    double t = c;
    for (int i = 0; i < dim_; ++i) {
      const int k = e[static_cast<std::size_t>(i)];
      t *= k <= 32 ? pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] : std::pow(z[i], k);
    }
    s += t;
  }
  return s;
}

Rational Polynomial::evaluate_exact(std::span<const Rational> z) const {
  if (static_cast<int>(z.size()) != dim_) throw DomainError("exact evaluation needs dim coordinates");
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) t *= z[static_cast<std::size_t>(i)];
    }
    s += t;
  }
  return s;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Exponent, Rational>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
    const int da = exponent_degree(a.first, dim_);
    const int db = exponent_degree(b.first, dim_);
    if (da != db) return da > db;
    return a.first > b.first;
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : ordered) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const bool is_const = exponent_degree(e, dim_) == 0;
    const bool unit = mag == 1;
    if (!unit || is_const) {
      os << mag.str();
      if (!is_const) os << "*";
    }
    bool first_var = true;
    for (int i = 0; i < dim_; ++i) {
      const int k = e[static_cast<std::size_t>(i)];
      if (k == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << "z" << (i + 1);
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

Polynomial laplacian(const Polynomial& p) { return p.laplacian(); }

BiharmonicPair almansi_pair(const Polynomial& h, const Polynomial& q) {
  if (h.dim() != q.dim()) throw DomainError("almansi_pair: h and q have different dimensions");
  if (!h.laplacian().is_zero()) throw DomainError("almansi_pair: h = " + h.to_string() + " is not harmonic");
  if (!q.laplacian().is_zero()) throw DomainError("almansi_pair: q = " + q.to_string() + " is not harmonic");
  const int n = h.dim();
  Polynomial u1 = q + Polynomial::norm_squared(n) * h;
  Polynomial radial(n);
  for (int i = 0; i < n; ++i) radial += Polynomial::variable(n, i) * h.derivative(i);
  Polynomial u2 = (h * Rational(2 * n) + radial * Rational(4)) * Rational(-1);
  return {std::move(u1), std::move(u2)};
}

bool is_biharmonic_pair(const BiharmonicPair& p) {
  return (p.u1.laplacian() + p.u2).is_zero() && p.u2.laplacian().is_zero();
}

namespace {

Rational binomial(int n, int k) {
  Rational r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All exponents of total degree k in the first `vars` variables.
void exponents_of_degree(int vars, int k, int index, Exponent& cur, std::vector<Exponent>& out) {
  if (index == vars - 1) {
    cur[static_cast<std::size_t>(index)] = static_cast<std::uint8_t>(k);
    out.push_back(cur);
    cur[static_cast<std::size_t>(index)] = 0;
    return;
  }
  for (int j = k; j >= 0; --j) {
    cur[static_cast<std::size_t>(index)] = static_cast<std::uint8_t>(j);
    exponents_of_degree(vars, k - j, index + 1, cur, out);
  }
  cur[static_cast<std::size_t>(index)] = 0;
}

// Unique harmonic h = sum_j z_n^j c_j with c_0 = seed0, c_1 = seed1 and
// c_{j+2} = -Delta' c_j / ((j+2)(j+1)), Delta' acting on z_1..z_{n-1}.
Polynomial harmonic_completion(int n, const Polynomial& seed0, const Polynomial& seed1) {
  const Polynomial zn = Polynomial::variable(n, n - 1);
  std::vector<Polynomial> c{seed0, seed1};
  for (std::size_t j = 0;; ++j) {
    Polynomial next = c[j].laplacian(n - 1) * Rational(-1, static_cast<long>((j + 2) * (j + 1)));
    if (next.is_zero() && (j + 1 >= c.size() || c[j + 1].is_zero())) break;
    c.push_back(std::move(next));
    if (c.size() > 64) throw DomainError("harmonic completion did not terminate");
  }
  Polynomial h(n);
  Polynomial power = Polynomial::constant(n, 1);
  for (const Polynomial& cj : c) {
    h += power * cj;
    power = power * zn;
  }
  return h;
}

}  // namespace

std::vector<Polynomial> harmonic_basis_degree(int n, int k) {
  if (n < 2 || n > kMaxDim) throw DomainError("harmonic_basis: dimension out of range");
  if (k < 0) throw DomainError("harmonic_basis: negative degree");
  if (k > kMaxHarmonicDegree) {
    throw DomainError("harmonic_basis: degree " + std::to_string(k) + " exceeds cap " +
                      std::to_string(kMaxHarmonicDegree));
  }
  std::vector<Polynomial> out;
  if (k == 0) {
    out.push_back(Polynomial::constant(n, 1));
    return out;
  }
  if (n == 2) {
    // Re and Im of (z1 + i z2)^k.
    Polynomial re(2), im(2);
    for (int j = 0; j <= k; ++j) {
      Exponent e{};
      e[0] = static_cast<std::uint8_t>(k - j);
      e[1] = static_cast<std::uint8_t>(j);
      const Rational c = binomial(k, j);
      const int sign = (j / 2) % 2 == 0 ? 1 : -1;
      if (j % 2 == 0) {
        re += Polynomial::monomial(2, e, c * sign);
      } else {
        im += Polynomial::monomial(2, e, c * sign);
      }
    }
    out.push_back(std::move(re));
    out.push_back(std::move(im));
    return out;
  }
  Exponent cur{};
  std::vector<Exponent> top, lower;
  exponents_of_degree(n - 1, k, 0, cur, top);
  exponents_of_degree(n - 1, k - 1, 0, cur, lower);
  const Polynomial zero(n);
  for (const Exponent& e : top) out.push_back(harmonic_completion(n, Polynomial::monomial(n, e), zero));
  for (const Exponent& e : lower) out.push_back(harmonic_completion(n, zero, Polynomial::monomial(n, e)));
  return out;
}

std::vector<Polynomial> harmonic_basis(int n, int max_degree) {
  std::vector<Polynomial> out;
  for (int k = 0; k <= max_degree; ++k) {
    auto part = harmonic_basis_degree(n, k);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("cannot parse polynomial '" + std::string(s_) + "' at offset " + std::to_string(pos_) +
                      ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept(std::string_view word) {
    skip();
    if (s_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  long integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p += term();
      } else if (accept('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = power();
    for (;;) {
      skip();
      if (accept('*')) {
        p = p * power();
      } else if (pos_ < s_.size() && (s_[pos_] == 'z' || s_[pos_] == '(' || s_[pos_] == '|')) {
        p = p * power();
      } else {
        return p;
      }
    }
  }

  Polynomial power() {
    if (accept('-')) return power() * Rational(-1);
    if (accept('+')) return power();
    const bool is_norm = peek_norm();
    Polynomial base = atom();
    if (accept('^')) {
      const long k = integer();
      if (is_norm) {
        if (k % 2 != 0) fail("|z| must be raised to an even power");
        Polynomial r2 = Polynomial::norm_squared(dim_);
        Polynomial out = Polynomial::constant(dim_, 1);
        for (long i = 0; i < k / 2; ++i) out = out * r2;
        return out;
      }
      Polynomial out = Polynomial::constant(dim_, 1);
      for (long i = 0; i < k; ++i) out = out * base;
      return out;
    }
    if (is_norm) fail("|z| must be raised to an even power");
    return base;
  }

  bool peek_norm() {
    skip();
    return s_.substr(pos_, 3) == "|z|";
  }

  Polynomial atom() {
    skip();
    if (accept("|z|")) return Polynomial::constant(dim_, 1);  // exponent handled by power()
    if (accept('(')) {
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (accept('z')) {
      const long i = integer();
      if (i < 1 || i > dim_) fail("variable index out of range");
      return Polynomial::variable(dim_, static_cast<int>(i - 1));
    }
    const long num = integer();
    Rational c = num;
    if (accept('/')) {
      const long den = integer();
      if (den == 0) fail("division by zero");
      c /= den;
    }
    return Polynomial::constant(dim_, c);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

ZooMember make_member(std::string name, Polynomial u1) {
  Polynomial u2 = u1.laplacian() * Rational(-1);
  const bool pair = u2.laplacian().is_zero();
  return ZooMember{std::move(name), std::move(u1), std::move(u2), pair};
}

// Value of key=... in a comma separated list.
std::string_view field(std::string_view body, std::string_view key) {
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t end = std::min(body.find(',', start), body.size());
    const std::string_view item = body.substr(start, end - start);
    if (item.size() > key.size() && item.substr(0, key.size()) == key && item[key.size()] == '=') {
      return item.substr(key.size() + 1);
    }
    start = end + 1;
  }
  throw DomainError("zoo name is missing '" + std::string(key) + "='");
}

}  // namespace

Polynomial parse_polynomial(std::string_view expr, int dim) { return Parser(expr, dim).parse(); }

ZooMember zoo_lookup(std::string_view name, int dim) {
  const std::size_t colon = name.find(':');
  if (colon == std::string_view::npos) throw DomainError("zoo name needs a 'kind:' prefix: " + std::string(name));
  const std::string_view kind = name.substr(0, colon);
  const std::string_view body = name.substr(colon + 1);
  if (kind == "poly") return make_member(std::string(name), parse_polynomial(body, dim));
  if (kind == "harmonic") {
    const int deg = std::stoi(std::string(field(body, "deg")));
    const int idx = std::stoi(std::string(field(body, "idx")));
    auto basis = harmonic_basis_degree(dim, deg);
    if (idx < 0 || idx >= static_cast<int>(basis.size())) throw DomainError("harmonic index out of range");
    return make_member(std::string(name), basis[static_cast<std::size_t>(idx)]);
  }
  if (kind == "almansi") {
    const Polynomial h = parse_polynomial(field(body, "h"), dim);
    const Polynomial q = parse_polynomial(field(body, "q"), dim);
    BiharmonicPair pair = almansi_pair(h, q);
    return ZooMember{std::string(name), std::move(pair.u1), std::move(pair.u2), true};
  }
  throw DomainError("unknown zoo kind '" + std::string(kind) + "'");
}

std::vector<ZooMember> zoo_list(int dim, int max_degree) {
  std::vector<ZooMember> out;
  for (int k = 0; k <= max_degree; ++k) {
    const auto basis = harmonic_basis_degree(dim, k);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      out.push_back(make_member("harmonic:deg=" + std::to_string(k) + ",idx=" + std::to_string(i), basis[i]));
    }
  }
  for (int k = 0; k + 2 <= max_degree; ++k) {
    const auto basis = harmonic_basis_degree(dim, k);
    for (const Polynomial& h : basis) {
      const std::string name = "almansi:h=" + h.to_string() + ",q=0";
      BiharmonicPair pair = almansi_pair(h, Polynomial(dim));
      out.push_back(ZooMember{name, std::move(pair.u1), std::move(pair.u2), true});
    }
  }
  if (max_degree >= 4) out.push_back(make_member("poly:|z|^4", parse_polynomial("|z|^4", dim)));
  return out;
}

Gamma1Estimate gamma1_estimate(const ScalarField& f, const Point& x, std::span<const double> radii, int quad_order) {
  if (radii.empty()) throw DomainError("gamma1_estimate needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("gamma1_estimate: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw DomainError("gamma1_estimate: radii must decrease");
  }
  const double fx = f(x);
  if (!std::isfinite(fx)) throw SingularityError("gamma1_estimate: f(x) is not finite");

  Gamma1Estimate out;
  IntegrationOptions opts;
  opts.quad_order = quad_order;
  for (const double R : radii) {
    const Ball ball(x, R);
    const double mean = integrate(SignedMeasure::harmonic(ball, x), f, opts);
    const double mass = riquier_coupling_mass(ball, x, quad_order);
    if (!(mass > 1e-290)) throw SingularityError("gamma1_estimate: coupling mass underflow at R = " + std::to_string(R));
    out.radii.push_back(R);
    out.quotients.push_back((fx - mean) / mass);
  }
  if (radii.size() == 1) {
    out.value = out.quotients.front();
    return out;
  }
  const std::size_t b = radii.size() - 1;
  const double ra2 = radii[b - 1] * radii[b - 1];
  const double rb2 = radii[b] * radii[b];
  out.value = (out.quotients[b] * ra2 - out.quotients[b - 1] * rb2) / (ra2 - rb2);
  return out;
}

}  // namespace binormal

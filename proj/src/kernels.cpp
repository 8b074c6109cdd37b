#include "binormal/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "binormal/errors.hpp"

namespace binormal {

namespace {

constexpr double kBoundaryTol = 1e-12;

int common_dim(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) throw DomainError("kernel arguments have different dimensions");
  if (x.dim() < 2) throw DomainError("kernels need n >= 2");
  return x.dim();
}

// Kernel profile of G1 as a function of the distance.
double newtonian_profile(double r, int n) {
  if (n == 2) return -std::log(r) / (2.0 * std::numbers::pi);
  return std::pow(r, 2 - n) / ((n - 2) * unit_sphere_area(n));
}

void require_ball_dim(const Ball& ball) {
  if (ball.dim() != 2 && ball.dim() != 3) throw UnsupportedError("ball kernels support n = 2, 3 only");
}

void require_in_closed_ball(const Ball& ball, const Point& p, const char* name) {
  if (p.dim() != ball.dim()) throw DomainError(std::string(name) + " has the wrong dimension");
  if (distance(p, ball.center()) > ball.radius() * (1.0 + kBoundaryTol)) {
    throw DomainError(std::string(name) + " = " + to_string(p) + " lies outside " + to_string(ball));
  }
}

bool near_sphere(const Ball& ball, const Point& p) {
  return distance(p, ball.center()) >= ball.radius() * (1.0 - kBoundaryTol);
}

}  // namespace

std::string to_string(KernelTag tag) {
  switch (tag) {
    case KernelTag::kNewtonian:
      return "newtonian";
    case KernelTag::kBallGreen:
      return "ball-green";
    case KernelTag::kBiharmFundamental:
      return "biharm";
    case KernelTag::kRieszIterated:
      return "riesz";
    case KernelTag::kIteratedBallGreen:
      return "iterated-ball-green";
  }
  return "unknown";
}

KernelId KernelId::newtonian(int dim) { return {KernelTag::kNewtonian, dim, std::nullopt}; }
KernelId KernelId::ball_green(const Ball& ball) { return {KernelTag::kBallGreen, ball.dim(), ball}; }
KernelId KernelId::biharm_fundamental(int dim) { return {KernelTag::kBiharmFundamental, dim, std::nullopt}; }
KernelId KernelId::riesz_iterated(int dim) { return {KernelTag::kRieszIterated, dim, std::nullopt}; }
KernelId KernelId::iterated_ball_green(const Ball& ball) {
  return {KernelTag::kIteratedBallGreen, ball.dim(), ball};
}

void KernelId::validate() const {
  if (dim < 2 || dim > kMaxDim) throw UnsupportedError("kernel dimension out of range");
  switch (tag) {
    case KernelTag::kNewtonian:
      return;
    case KernelTag::kBiharmFundamental:
      if (dim == 4) throw UnsupportedError("the biharmonic kernel is not implemented for n = 4");
      return;
    case KernelTag::kRieszIterated:
      if (dim < 5) throw UnsupportedError("the whole-space iterated kernel needs n >= 5");
      return;
    case KernelTag::kBallGreen:
    case KernelTag::kIteratedBallGreen:
      if (!ball) throw DomainError(to_string(tag) + " kernel needs a ball");
      if (ball->dim() != dim) throw DomainError("kernel ball dimension mismatch");
      require_ball_dim(*ball);
      return;
  }
}

double newtonian(const Point& x, const Point& y) {
  const int n = common_dim(x, y);
  const double r = distance(x, y);
  if (r == 0.0) throw SingularityError("newtonian kernel evaluated at its pole " + to_string(x));
  return newtonian_profile(r, n);
}

double ball_green(const Ball& ball, const Point& x, const Point& y) {
  require_ball_dim(ball);
  require_in_closed_ball(ball, x, "x");
  require_in_closed_ball(ball, y, "y");
  if (near_sphere(ball, x) || near_sphere(ball, y)) return 0.0;
  const double r = distance(x, y);
  if (r == 0.0) throw SingularityError("ball Green function evaluated at its pole " + to_string(x));
  // |x - c| |x* - y| / R, written symmetrically in x and y.
  const Point a = x - ball.center();
  const Point b = y - ball.center();
  const double R = ball.radius();
  const double image2 = norm2(a) * norm2(b) / (R * R) - 2.0 * dot(a, b) + R * R;
  const double image = std::sqrt(std::max(image2, r * r));
  const int n = ball.dim();
  double g;
  if (n == 2) {
    g = std::log(image / r) / (2.0 * std::numbers::pi);
  } else {
    g = newtonian_profile(r, n) - newtonian_profile(image, n);
  }
  return std::max(0.0, g);
}

double biharm_fundamental(const Point& x, const Point& y) {
  const int n = common_dim(x, y);
  const double r = distance(x, y);
  switch (n) {
    case 2:
      if (r == 0.0) throw SingularityError("2D biharmonic kernel evaluated at its pole " + to_string(x));
      return r * r * std::log(r) / (8.0 * std::numbers::pi);
    case 3:
      return r;
    case 4:
      throw UnsupportedError("the biharmonic kernel is not implemented for n = 4");
    default:
      if (r == 0.0) throw SingularityError("biharmonic kernel evaluated at its pole " + to_string(x));
      return std::pow(r, 4 - n);
  }
}

double riesz_constant(int n) {
  if (n < 5) throw UnsupportedError("the whole-space iterated kernel needs n >= 5");
  return 1.0 / (2.0 * (n - 4) * (n - 2) * unit_sphere_area(n));
}

double riesz_iterated(const Point& x, const Point& y) {
  const int n = common_dim(x, y);
  const double c = riesz_constant(n);
  const double r = distance(x, y);
  if (r == 0.0) throw SingularityError("iterated kernel evaluated at its pole " + to_string(x));
  return c * std::pow(r, 4 - n);
}

double iterated_ball_green(const Ball& ball, const Point& x, const Point& y, int quad_order) {
  require_ball_dim(ball);
  require_in_closed_ball(ball, x, "x");
  require_in_closed_ball(ball, y, "y");
  if (near_sphere(ball, x) || near_sphere(ball, y)) return 0.0;
  const std::array<Point, 2> poles{x, y};
  const double value = integrate_ball_split(
      ball, poles,
      [&](const Point& z) {
        // The graded radial rule never samples the poles themselves.
        return ball_green(ball, x, z) * ball_green(ball, z, y);
      },
      VolumeRule{quad_order, quad_order});
  if (!std::isfinite(value)) throw SingularityError("iterated ball Green quadrature is not finite");
  return value;
}

double biharm_laplacian_ratio(int n) {
  switch (n) {
    case 2:
      return -1.0;
    case 3:
      return 8.0 * std::numbers::pi;
    case 4:
      throw UnsupportedError("the biharmonic kernel is not implemented for n = 4");
    default:
      return 2.0 * (4 - n) * (n - 2) * unit_sphere_area(n);
  }
}

double evaluate(const KernelId& id, const Point& x, const Point& y, int quad_order) {
  id.validate();
  switch (id.tag) {
    case KernelTag::kNewtonian:
      return newtonian(x, y);
    case KernelTag::kBallGreen:
      return ball_green(*id.ball, x, y);
    case KernelTag::kBiharmFundamental:
      return biharm_fundamental(x, y);
    case KernelTag::kRieszIterated:
      return riesz_iterated(x, y);
    case KernelTag::kIteratedBallGreen:
      return iterated_ball_green(*id.ball, x, y, quad_order);
  }
  throw DomainError("unknown kernel");
}

std::optional<simd::RadialProfile> radial_profile(const KernelId& id) {
  id.validate();
  const int n = id.dim;
  using simd::ProfileKind;
  switch (id.tag) {
    case KernelTag::kNewtonian:
      if (n == 2) return simd::RadialProfile{ProfileKind::kLog, 0, -1.0 / (2.0 * std::numbers::pi)};
      return simd::RadialProfile{ProfileKind::kPower, 2 - n, 1.0 / ((n - 2) * unit_sphere_area(n))};
    case KernelTag::kBiharmFundamental:
      if (n == 2) return simd::RadialProfile{ProfileKind::kSquareLog, 0, 1.0 / (8.0 * std::numbers::pi)};
      if (n == 3) return simd::RadialProfile{ProfileKind::kPower, 1, 1.0};
      return simd::RadialProfile{ProfileKind::kPower, 4 - n, 1.0};
    case KernelTag::kRieszIterated:
      return simd::RadialProfile{ProfileKind::kPower, 4 - n, riesz_constant(n)};
    case KernelTag::kBallGreen:
    case KernelTag::kIteratedBallGreen:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace binormal

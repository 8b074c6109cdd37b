#pragma once
// Closed forms used as independent references by the tests.
#include <cmath>
#include <numbers>

#include "binormal/geometry.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

// Average of z_1^{2a} over the unit sphere in R^n.
inline double even_moment(int n, int a) {
  double m = 1.0;
  for (int k = 0; k < a; ++k) m *= (2.0 * k + 1.0) / (n + 2.0 * k);
  return m;
}

inline double newtonian(int n, double r) {
  if (n == 2) return -std::log(r) / (2.0 * kPi);
  return std::pow(r, 2.0 - n) / ((n - 2.0) * sphere_area(n));
}

// Green function of B(0, R) with pole at the center.
inline double green_center(int n, double r, double R) { return newtonian(n, r) - newtonian(n, R); }

// Average of |y - z| over the sphere |z - c| = R, for |y - c| = d > R (n = 3).
inline double mean_distance_3d(double d, double R) { return d + R * R / (3.0 * d); }

// Exact Poisson extension in the unit disk of cos^2 at radius r, angle t.
inline double disk_cos2(double r, double t) { return 0.5 + 0.5 * r * r * std::cos(2.0 * t); }

inline double max_abs_rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle

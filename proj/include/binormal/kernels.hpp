#pragma once

// Closed-form kernels of the Laplacian and bi-Laplacian on R^n.
//
// Normalizations:
//   newtonian          -Delta G1(., y) = delta_y
//                      n >= 3: r^{2-n} / ((n-2) |S^{n-1}|),  n = 2: -log(r) / (2 pi)
//   biharm_fundamental bare radial profiles r^2 log(r) / (8 pi) (n = 2),
//                      r (n = 3), r^{4-n} (n >= 5); n = 4 is not supported
//   riesz_iterated     G2 = int G1(x, z) G1(z, y) dz = c_n r^{4-n},
//                      c_n = 1 / (2 (n-4)(n-2) |S^{n-1}|), n >= 5
//
// The Laplacian of the biharmonic profile is tied to G1 by
//   n = 2:  Delta w = -G1 + 1/(2 pi)
//   n >= 3: Delta w = biharm_laplacian_ratio(n) * G1,
// with ratio 8 pi for n = 3 and 2 (4-n)(n-2) |S^{n-1}| for n >= 5.

#include <optional>
#include <string>

#include "binormal/geometry.hpp"
#include "binormal/simd/kernel_sum.hpp"

namespace binormal {

enum class KernelTag { kNewtonian, kBallGreen, kBiharmFundamental, kRieszIterated, kIteratedBallGreen };

std::string to_string(KernelTag tag);

struct KernelId {
  KernelTag tag = KernelTag::kNewtonian;
  int dim = 3;
  std::optional<Ball> ball;  // BallGreen and IteratedBallGreen only

  static KernelId newtonian(int dim);
  static KernelId ball_green(const Ball& ball);
  static KernelId biharm_fundamental(int dim);
  static KernelId riesz_iterated(int dim);
  static KernelId iterated_ball_green(const Ball& ball);

  /// Throws UnsupportedError when the tag/dimension combination is invalid.
  void validate() const;
};

double newtonian(const Point& x, const Point& y);
double ball_green(const Ball& ball, const Point& x, const Point& y);
double biharm_fundamental(const Point& x, const Point& y);
double riesz_constant(int n);
double riesz_iterated(const Point& x, const Point& y);
/// G2,B(x, y) = int_B G_B(x, z) G_B(z, y) dz. Zero when x or y is on the sphere.
double iterated_ball_green(const Ball& ball, const Point& x, const Point& y, int quad_order = 48);

double biharm_laplacian_ratio(int n);

/// Evaluates the kernel (x, y) for the given id.
double evaluate(const KernelId& id, const Point& x, const Point& y, int quad_order = 48);

/// Radial profile of translation-invariant kernels, for batched evaluation.
std::optional<simd::RadialProfile> radial_profile(const KernelId& id);

}  // namespace binormal

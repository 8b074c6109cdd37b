#pragma once

// Walk-on-spheres estimators for the Dirichlet problem, the Riquier problem
// (Delta u1 = -u2, Delta u2 = 0) and a branching estimator built on the
// two-sphere mean-value identity.
//
// Every sample i draws from rng::Stream(seed, i), so estimates do not depend
// on the thread count. Totals are formed by pairwise summation in sample order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "binormal/geometry.hpp"

namespace binormal {

struct AxisBox {
  Point lower;
  Point upper;
};

class WosDomain {
 public:
  static WosDomain ball(const Ball& b);
  static WosDomain box(const Point& lower, const Point& upper);

  int dim() const noexcept;
  /// Distance to the boundary; negative outside.
  double distance_to_boundary(const Point& p) const noexcept;
  /// Nearest boundary point.
  Point project(const Point& p) const;
  bool contains_strictly(const Point& p) const noexcept { return distance_to_boundary(p) > 0.0; }
  std::string describe() const;

 private:
  explicit WosDomain(std::variant<Ball, AxisBox> shape) : shape_(std::move(shape)) {}
  std::variant<Ball, AxisBox> shape_;
};

struct WosConfig {
  double eps_shell = 1e-4;
  int max_steps = 10000;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Nested u2 walks per source evaluation (wos_riquier).
  int nested_budget = 8;

  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  /// Sample standard deviation / sqrt(samples_used).
  double std_error = 0.0;
  std::size_t samples_used = 0;
  double mean_steps = 0.0;
  std::size_t truncated_walks = 0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

using BoundaryField = ScalarField;

McEstimate wos_laplace(const WosDomain& dom, const BoundaryField& g, const Point& x, const WosConfig& cfg);

struct RiquierEstimate {
  McEstimate u1;
  McEstimate u2;
};

RiquierEstimate wos_riquier(const WosDomain& dom, const BoundaryField& f1, const BoundaryField& f2, const Point& x,
                            const WosConfig& cfg);

inline constexpr int kDefaultDepthCap = 12;
inline constexpr double kWeightGuard = 1e6;

/// EXPERIMENTAL. Signed branching estimator of u(x) = alpha E u(Z1) - beta E u(Z2)
/// on spheres of radius ratio*d and d about the current point (d = distance to
/// the boundary). Branches absorb in the eps shell, or at depth_cap by
/// projection onto the boundary; branches whose |weight| exceeds kWeightGuard
/// are dropped and counted.
McEstimate two_sphere_walk(const WosDomain& dom, const BoundaryField& f1, const Point& x, const WosConfig& cfg,
                           double ratio = 0.5, int depth_cap = kDefaultDepthCap);

/// Radius fraction t in [0, 1) with density proportional to the Green
/// function of the unit ball at its center, t^{n-1} G(t); u in [0, 1).
double sample_green_radius(int n, double u);

}  // namespace binormal

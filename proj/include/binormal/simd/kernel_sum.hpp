#pragma once

// Weighted sums of radial kernels over a cloud of nodes,
//
//   S(y) = sum_i w_i * k(|y - z_i|),
//
// the inner loop of every potential evaluation. A scalar reference kernel and
// an AVX2/FMA variant share one entry point; the variant is picked at runtime
// from CPUID and can be forced with BINORMAL_SIMD=scalar.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace binormal::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa) noexcept;

/// k(r) = scale * r^exponent, scale * log r, or scale * r^2 log r.
enum class ProfileKind { kPower, kLog, kSquareLog };

struct RadialProfile {
  ProfileKind kind = ProfileKind::kPower;
  int exponent = 0;  // only for kPower
  double scale = 1.0;
};

/// k evaluated from the squared distance.
double profile_value_r2(const RadialProfile& profile, double r2) noexcept;

/// Structure-of-arrays node storage, one contiguous array per coordinate.
class NodeCloud {
 public:
  explicit NodeCloud(int dim) : coords_(static_cast<std::size_t>(dim)) {}

  void push_back(std::span<const double> point, double weight);
  void reserve(std::size_t count);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  std::size_t size() const noexcept { return weights_.size(); }
  const double* coord(int d) const noexcept { return coords_[static_cast<std::size_t>(d)].data(); }
  const double* weights() const noexcept { return weights_.data(); }

 private:
  std::vector<std::vector<double>> coords_;
  std::vector<double> weights_;
};

/// Runtime-selected implementation.
double weighted_sum(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target);

double weighted_sum_scalar(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target);
double weighted_sum_avx2(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target);

bool isa_available(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Overrides the runtime choice (tests only); falls back to scalar when the
/// requested ISA is unavailable.
void force_isa(Isa isa) noexcept;
void reset_isa() noexcept;

}  // namespace binormal::simd

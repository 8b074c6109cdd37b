#include "binormal/simd/kernel_sum.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace binormal::simd {

std::string_view to_string(Isa isa) noexcept { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void NodeCloud::reserve(std::size_t count) {
  for (auto& c : coords_) c.reserve(count);
  weights_.reserve(count);
}

void NodeCloud::push_back(std::span<const double> point, double weight) {
  for (std::size_t d = 0; d < coords_.size(); ++d) coords_[d].push_back(point[d]);
  weights_.push_back(weight);
}

namespace {

double ipow(double base, int e) noexcept {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace

double profile_value_r2(const RadialProfile& p, double r2) noexcept {
  switch (p.kind) {
    case ProfileKind::kLog:
      return 0.5 * std::log(r2);
    case ProfileKind::kSquareLog:
      return 0.5 * r2 * std::log(r2);
    case ProfileKind::kPower:
      break;
  }
  const int q = p.exponent;
  if (q % 2 == 0) return q >= 0 ? ipow(r2, q / 2) : 1.0 / ipow(r2, -q / 2);
  const double r = std::sqrt(r2);
  return q > 0 ? r * ipow(r2, (q - 1) / 2) : 1.0 / (r * ipow(r2, (-q - 1) / 2));
}

double weighted_sum_scalar(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target) {
  const std::size_t n = cloud.size();
  const int dim = cloud.dim();
  const double* w = cloud.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = target[static_cast<std::size_t>(d)] - cloud.coord(d)[i];
      r2 += diff * diff;
    }
    sum += w[i] * profile_value_r2(profile, r2);
  }
  return profile.scale * sum;
}

namespace {

std::atomic<int> forced{-1};

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

bool avx2_compiled() noexcept;

}  // namespace

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::kScalar) return true;
  return avx2_compiled() && cpu_has_avx2();
}

Isa active_isa() noexcept {
  const int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa chosen = [] {
    const char* env = std::getenv("BINORMAL_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
  }();
  return chosen;
}

void force_isa(Isa isa) noexcept {
  forced.store(static_cast<int>(isa_available(isa) ? isa : Isa::kScalar), std::memory_order_relaxed);
}

void reset_isa() noexcept { forced.store(-1, std::memory_order_relaxed); }

double weighted_sum(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target) {
  return active_isa() == Isa::kAvx2 ? weighted_sum_avx2(profile, cloud, target)
                                    : weighted_sum_scalar(profile, cloud, target);
}

namespace {

bool avx2_compiled() noexcept {
#ifdef BINORMAL_HAVE_AVX2
  return true;
#else
  return false;
#endif
}

}  // namespace

}  // namespace binormal::simd

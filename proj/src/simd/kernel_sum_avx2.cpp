// Built with -mavx2 -mfma on x86-64; elsewhere this falls back to the scalar
// kernel and the dispatcher never selects it.

#include <cmath>

#include "binormal/simd/kernel_sum.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace binormal::simd {

#if defined(__AVX2__) && defined(__FMA__)

namespace {

inline __m256d ipow_pd(__m256d base, int e) noexcept {
  __m256d result = _mm256_set1_pd(1.0);
  while (e > 0) {
    if (e & 1) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    e >>= 1;
  }
  return result;
}

inline __m256d power_pd(__m256d r2, int q) noexcept {
  const __m256d one = _mm256_set1_pd(1.0);
  if (q % 2 == 0) {
    return q >= 0 ? ipow_pd(r2, q / 2) : _mm256_div_pd(one, ipow_pd(r2, -q / 2));
  }
  const __m256d r = _mm256_sqrt_pd(r2);
  return q > 0 ? _mm256_mul_pd(r, ipow_pd(r2, (q - 1) / 2))
               : _mm256_div_pd(one, _mm256_mul_pd(r, ipow_pd(r2, (-q - 1) / 2)));
}

inline double hsum(__m256d v) noexcept {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

double weighted_sum_avx2(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target) {
  const std::size_t n = cloud.size();
  const std::size_t blocks = n / 4 * 4;
  const int dim = cloud.dim();
  const double* w = cloud.weights();

  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < blocks; i += 4) {
    __m256d r2 = _mm256_setzero_pd();
    for (int d = 0; d < dim; ++d) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_set1_pd(target[static_cast<std::size_t>(d)]), _mm256_loadu_pd(cloud.coord(d) + i));
      r2 = _mm256_fmadd_pd(diff, diff, r2);
    }
    __m256d value;
    if (profile.kind == ProfileKind::kPower) {
      value = power_pd(r2, profile.exponent);
    } else {
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, r2);
      for (double& l : lanes) l = profile_value_r2(profile, l);
      value = _mm256_load_pd(lanes);
    }
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), value, acc);
  }

  double sum = hsum(acc);
  for (std::size_t i = blocks; i < n; ++i) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = target[static_cast<std::size_t>(d)] - cloud.coord(d)[i];
      r2 += diff * diff;
    }
    sum += w[i] * profile_value_r2(profile, r2);
  }
  return profile.scale * sum;
}

#else

double weighted_sum_avx2(const RadialProfile& profile, const NodeCloud& cloud, std::span<const double> target) {
  return weighted_sum_scalar(profile, cloud, target);
}

#endif

}  // namespace binormal::simd

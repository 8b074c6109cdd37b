#include <cmath>
#include <limits>
#include <random>

#include "binormal/simd/kernel_sum.hpp"
#include "doctest.h"

using namespace binormal::simd;

namespace {

struct Cloud {
  NodeCloud cloud;
  std::vector<double> target;
};

Cloud random_cloud(int dim, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Cloud c{NodeCloud(dim), {}};
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < count; ++i) {
    for (double& v : p) v = u(gen);
    c.cloud.push_back(p, u(gen));
  }
  for (int d = 0; d < dim; ++d) c.target.push_back(3.0 + u(gen));
  return c;
}

// Sum of |w_i f(r_i)|, the scale of the rounding error of any summation order.
double abs_sum(const RadialProfile& p, const NodeCloud& cloud, std::span<const double> target) {
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double r2 = 0.0;
    for (int d = 0; d < cloud.dim(); ++d) {
      const double diff = target[static_cast<std::size_t>(d)] - cloud.coord(d)[i];
      r2 += diff * diff;
    }
    s += std::abs(cloud.weights()[i] * profile_value_r2(p, r2));
  }
  return std::abs(p.scale) * s;
}

const std::vector<RadialProfile> kProfiles{
    {ProfileKind::kPower, -1, 0.25}, {ProfileKind::kPower, 1, 1.0},  {ProfileKind::kPower, -3, 2.0},
    {ProfileKind::kPower, 0, 1.0},   {ProfileKind::kPower, 2, -0.5}, {ProfileKind::kLog, 0, -0.159},
    {ProfileKind::kSquareLog, 0, 0.04}};

}  // namespace

TEST_CASE("profile values") {
  CHECK(profile_value_r2({ProfileKind::kPower, -1, 1.0}, 4.0) == doctest::Approx(0.5));
  CHECK(profile_value_r2({ProfileKind::kPower, 3, 1.0}, 4.0) == doctest::Approx(8.0));
  CHECK(profile_value_r2({ProfileKind::kPower, -2, 1.0}, 4.0) == doctest::Approx(0.25));
  CHECK(profile_value_r2({ProfileKind::kLog, 0, 1.0}, std::exp(2.0)) == doctest::Approx(1.0));
  CHECK(profile_value_r2({ProfileKind::kSquareLog, 0, 1.0}, std::exp(2.0)) == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("scalar kernel matches a direct sum") {
  const Cloud c = random_cloud(3, 37, 1);
  const RadialProfile p{ProfileKind::kPower, -1, 0.5};
  double direct = 0.0;
  for (std::size_t i = 0; i < c.cloud.size(); ++i) {
    const double r = std::hypot(c.target[0] - c.cloud.coord(0)[i], c.target[1] - c.cloud.coord(1)[i],
                                c.target[2] - c.cloud.coord(2)[i]);
    direct += c.cloud.weights()[i] * 0.5 / r;
  }
  CHECK(weighted_sum_scalar(p, c.cloud, c.target) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("avx2 kernel is equivalent to the scalar kernel") {
  if (!isa_available(Isa::kAvx2)) {
    MESSAGE("AVX2 not available; equivalence check skipped");
    return;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int dim : {2, 3, 5, 8}) {
    for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 17u, 1000u, 4099u}) {
      const Cloud c = random_cloud(dim, count, 100 * dim + count);
      for (const RadialProfile& p : kProfiles) {
        const double s = weighted_sum_scalar(p, c.cloud, c.target);
        const double v = weighted_sum_avx2(p, c.cloud, c.target);
        const double bound = 8.0 * eps * (static_cast<double>(count) + 4.0) * abs_sum(p, c.cloud, c.target);
        CAPTURE(dim);
        CAPTURE(count);
        CHECK(std::abs(s - v) <= bound);
      }
    }
  }
}

TEST_CASE("dispatch can be forced") {
  const Cloud c = random_cloud(3, 99, 5);
  const RadialProfile p{ProfileKind::kPower, -1, 1.0};
  force_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  CHECK(weighted_sum(p, c.cloud, c.target) == weighted_sum_scalar(p, c.cloud, c.target));
  force_isa(Isa::kAvx2);
  if (isa_available(Isa::kAvx2)) {
    CHECK(active_isa() == Isa::kAvx2);
    CHECK(weighted_sum(p, c.cloud, c.target) == weighted_sum_avx2(p, c.cloud, c.target));
  } else {
    CHECK(active_isa() == Isa::kScalar);
  }
  reset_isa();
  CHECK(to_string(Isa::kAvx2) == "avx2");
}

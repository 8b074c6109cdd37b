#include "binormal/wos.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "binormal/errors.hpp"
#include "binormal/rng.hpp"

namespace binormal {

WosDomain WosDomain::ball(const Ball& b) {
  if (b.dim() != 2 && b.dim() != 3) throw UnsupportedError("walk-on-spheres domains support n = 2, 3");
  return WosDomain(b);
}

WosDomain WosDomain::box(const Point& lower, const Point& upper) {
  if (lower.dim() != upper.dim()) throw DomainError("box corners have different dimensions");
  if (lower.dim() != 2 && lower.dim() != 3) throw UnsupportedError("walk-on-spheres domains support n = 2, 3");
  if (!is_finite(lower) || !is_finite(upper)) throw DomainError("box corners must be finite");
  for (int i = 0; i < lower.dim(); ++i) {
    if (!(lower[i] < upper[i])) throw DomainError("box has empty interior along axis " + std::to_string(i + 1));
  }
  return WosDomain(AxisBox{lower, upper});
}

int WosDomain::dim() const noexcept {
  if (const auto* b = std::get_if<Ball>(&shape_)) return b->dim();
  return std::get<AxisBox>(shape_).lower.dim();
}

double WosDomain::distance_to_boundary(const Point& p) const noexcept {
  if (const auto* b = std::get_if<Ball>(&shape_)) return b->radius() - distance(p, b->center());
  const AxisBox& box = std::get<AxisBox>(shape_);
  double d = INFINITY;
  for (int i = 0; i < p.dim(); ++i) d = std::min({d, p[i] - box.lower[i], box.upper[i] - p[i]});
  return d;
}

Point WosDomain::project(const Point& p) const {
  if (const auto* b = std::get_if<Ball>(&shape_)) {
    const Point v = p - b->center();
    const double len = norm(v);
    if (len == 0.0) return b->center() + axis_point(p.dim(), 0, b->radius());
    return b->center() + v * (b->radius() / len);
  }
  const AxisBox& box = std::get<AxisBox>(shape_);
  Point q = p;
  int axis = 0;
  bool upper = false;
  double best = INFINITY;
  for (int i = 0; i < p.dim(); ++i) {
    q[i] = std::clamp(p[i], box.lower[i], box.upper[i]);
    if (q[i] - box.lower[i] < best) {
      best = q[i] - box.lower[i];
      axis = i;
      upper = false;
    }
    if (box.upper[i] - q[i] < best) {
      best = box.upper[i] - q[i];
      axis = i;
      upper = true;
    }
  }
  q[axis] = upper ? box.upper[axis] : box.lower[axis];
  return q;
}

std::string WosDomain::describe() const {
  if (const auto* b = std::get_if<Ball>(&shape_)) return "ball " + to_string(*b);
  const AxisBox& box = std::get<AxisBox>(shape_);
  return "box " + to_string(box.lower) + " .. " + to_string(box.upper);
}

void WosConfig::validate() const {
  if (!(eps_shell > 0.0) || !std::isfinite(eps_shell)) throw DomainError("eps_shell must be positive");
  if (max_steps < 1) throw DomainError("max_steps must be at least 1");
  if (samples < 1) throw DomainError("samples must be at least 1");
  if (nested_budget < 1) throw DomainError("nested_budget must be at least 1");
}

double sample_green_radius(int n, double u) {
  if (n == 3) {
    // Inverse of F(t) = 3t^2 - 2t^3.
    return 0.5 - std::sin(std::asin(1.0 - 2.0 * u) / 3.0);
  }
  if (n != 2) throw UnsupportedError("sample_green_radius supports n = 2, 3");
  // F(t) = t^2 (1 - 2 log t) is increasing on (0, 1]; bisection then Newton.
  if (u <= 0.0) return 0.0;
  const auto F = [](double t) { return t * t * (1.0 - 2.0 * std::log(t)); };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < u ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double dF = -4.0 * t * std::log(t);
    if (!(dF > 0.0)) break;
    const double next = t - (F(t) - u) / dF;
    if (!(next > lo && next < hi)) break;
    t = next;
  }
  return t;
}

namespace {

Point random_direction(int n, rng::Stream& s) {
  Point d(n);
  double len2 = 0.0;
  while (len2 == 0.0) {
    for (int i = 0; i < n; ++i) d[i] = s.normal();
    len2 = norm2(d);
  }
  return d * (1.0 / std::sqrt(len2));
}

struct WalkResult {
  double value = 0.0;
  int steps = 0;
  bool truncated = false;
};

WalkResult walk(const WosDomain& dom, const BoundaryField& g, const Point& x, const WosConfig& cfg, rng::Stream& s) {
  Point y = x;
  WalkResult r;
  for (;;) {
    const double d = dom.distance_to_boundary(y);
    if (d <= cfg.eps_shell) break;
    if (r.steps >= cfg.max_steps) {
      r.truncated = true;
      break;
    }
    y += random_direction(y.dim(), s) * d;
    ++r.steps;
  }
  r.value = g(dom.project(y));
  if (!std::isfinite(r.value)) throw SingularityError("boundary data is not finite at " + to_string(dom.project(y)));
  return r;
}

struct Sample {
  double v0 = 0.0;
  double v1 = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t truncated = 0;
  std::uint64_t c0 = 0;
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
  std::uint64_t steps2 = 0;
};

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Mean and standard error; a constant sample gives exactly (c, 0).
std::pair<double, double> mean_and_error(std::vector<double>& v) {
  const std::size_t n = v.size();
  const double shift = v.front();
  for (double& x : v) x -= shift;
  const double mean_dev = pairwise_sum(v.data(), n) / static_cast<double>(n);
  for (double& x : v) x = (x - mean_dev) * (x - mean_dev);
  const double var = n > 1 ? pairwise_sum(v.data(), n) / static_cast<double>(n - 1) : 0.0;
  return {shift + mean_dev, std::sqrt(var / static_cast<double>(n))};
}

template <class Fn>
std::vector<Sample> run_samples(const WosConfig& cfg, Fn&& fn) {
  std::vector<Sample> out(cfg.samples);
  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.samples));
  const auto body = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      rng::Stream s(cfg.seed, i);
      out[i] = fn(s);
    }
  };
  if (threads <= 1) {
    body(0, cfg.samples);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (cfg.samples + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(cfg.samples, t * chunk);
    const std::size_t end = std::min(cfg.samples, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

McEstimate summarize(const std::vector<Sample>& samples, double Sample::*field) {
  std::vector<double> v(samples.size());
  std::uint64_t steps = 0, truncated = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    v[i] = samples[i].*field;
    steps += samples[i].steps;
    truncated += samples[i].truncated;
  }
  McEstimate e;
  std::tie(e.value, e.std_error) = mean_and_error(v);
  e.samples_used = samples.size();
  e.mean_steps = static_cast<double>(steps) / static_cast<double>(samples.size());
  e.truncated_walks = truncated;
  if (truncated * 100 > samples.size()) {
    e.warnings.push_back("max_steps exceeded on " + std::to_string(truncated) + " of " +
                         std::to_string(samples.size()) + " walks");
  }
  return e;
}

void check_start(const WosDomain& dom, const Point& x, const WosConfig& cfg) {
  cfg.validate();
  if (x.dim() != dom.dim()) throw DomainError("start point has the wrong dimension");
  if (!dom.contains_strictly(x)) throw DomainError("start point " + to_string(x) + " is not inside the domain");
}

}  // namespace

McEstimate wos_laplace(const WosDomain& dom, const BoundaryField& g, const Point& x, const WosConfig& cfg) {
  check_start(dom, x, cfg);
  const auto samples = run_samples(cfg, [&](rng::Stream& s) {
    const WalkResult w = walk(dom, g, x, cfg, s);
    Sample out;
    out.v0 = w.value;
    out.steps = static_cast<std::uint64_t>(w.steps);
    out.truncated = w.truncated ? 1 : 0;
    return out;
  });
  return summarize(samples, &Sample::v0);
}

RiquierEstimate wos_riquier(const WosDomain& dom, const BoundaryField& f1, const BoundaryField& f2, const Point& x,
                            const WosConfig& cfg) {
  check_start(dom, x, cfg);
  const int n = dom.dim();
  const auto samples = run_samples(cfg, [&](rng::Stream& s) {
    Sample out;
    // u2 at x.
    const WalkResult w2 = walk(dom, f2, x, cfg, s);
    out.v1 = w2.value;
    // u1 at x: boundary term plus the Green-volume source of every step.
    Point y = x;
    double source = 0.0;
    int steps = 0;
    bool truncated = false;
    for (;;) {
      const double d = dom.distance_to_boundary(y);
      if (d <= cfg.eps_shell) break;
      if (steps >= cfg.max_steps) {
        truncated = true;
        break;
      }
      const double t = sample_green_radius(n, s.uniform());
      const Point z = y + random_direction(n, s) * (t * d);
      double nested = 0.0;
      for (int k = 0; k < cfg.nested_budget; ++k) {
        const WalkResult inner = walk(dom, f2, z, cfg, s);
        nested += inner.value;
        out.c1 += inner.truncated ? 1 : 0;
      }
      out.c0 += static_cast<std::uint64_t>(cfg.nested_budget);
      source += d * d / (2.0 * n) * (nested / cfg.nested_budget);
      y += random_direction(n, s) * d;
      ++steps;
    }
    const double boundary = f1(dom.project(y));
    if (!std::isfinite(boundary)) throw SingularityError("boundary data f1 is not finite");
    out.v0 = boundary + source;
    out.steps = static_cast<std::uint64_t>(steps);
    out.truncated = truncated ? 1 : 0;
    out.c2 = w2.truncated ? 1 : 0;
    out.steps2 = static_cast<std::uint64_t>(w2.steps);
    return out;
  });

  RiquierEstimate r{summarize(samples, &Sample::v0), {}};
  std::vector<Sample> second = samples;
  for (Sample& s : second) {
    s.steps = s.steps2;
    s.truncated = s.c2;
  }
  r.u2 = summarize(second, &Sample::v1);
  std::uint64_t nested = 0, nested_truncated = 0;
  for (const Sample& s : samples) {
    nested += s.c0;
    nested_truncated += s.c1;
  }
  r.u1.diagnostics["nested_walks"] = static_cast<double>(nested);
  r.u1.diagnostics["nested_truncated"] = static_cast<double>(nested_truncated);
  r.u1.diagnostics["nested_budget"] = cfg.nested_budget;
  if (nested_truncated * 100 > nested) {
    r.u1.warnings.push_back("nested walks exceeded max_steps on " + std::to_string(nested_truncated) + " of " +
                            std::to_string(nested) + " walks");
  }
  return r;
}

namespace {

struct BranchCounters {
  std::uint64_t nodes = 0;
  std::uint64_t capped = 0;
  std::uint64_t aborted = 0;
};

double branch(const WosDomain& dom, const BoundaryField& f1, const Point& y, const WosConfig& cfg, double ratio,
              double alpha, double beta, int depth, int depth_cap, double weight, rng::Stream& s,
              BranchCounters& counters) {
  ++counters.nodes;
  if (std::abs(weight) > kWeightGuard) {
    ++counters.aborted;
    return 0.0;
  }
  const double d = dom.distance_to_boundary(y);
  if (d <= cfg.eps_shell || depth >= depth_cap) {
    if (d > cfg.eps_shell) ++counters.capped;
    const double v = f1(dom.project(y));
    if (!std::isfinite(v)) throw SingularityError("boundary data f1 is not finite");
    return v;
  }
  const int n = y.dim();
  const Point inner = y + random_direction(n, s) * (ratio * d);
  const Point outer = y + random_direction(n, s) * d;
  const double a = branch(dom, f1, inner, cfg, ratio, alpha, beta, depth + 1, depth_cap, weight * alpha, s, counters);
  const double b = branch(dom, f1, outer, cfg, ratio, alpha, beta, depth + 1, depth_cap, weight * beta, s, counters);
  return alpha * a - beta * b;
}

}  // namespace

McEstimate two_sphere_walk(const WosDomain& dom, const BoundaryField& f1, const Point& x, const WosConfig& cfg,
                           double ratio, int depth_cap) {
  check_start(dom, x, cfg);
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("two_sphere_walk: ratio must lie in (0, 1)");
  if (depth_cap < 1) throw DomainError("two_sphere_walk: depth_cap must be at least 1");
  const double alpha = 1.0 / (1.0 - ratio * ratio);
  const double beta = alpha - 1.0;
  const auto samples = run_samples(cfg, [&](rng::Stream& s) {
    BranchCounters c;
    Sample out;
    out.v0 = branch(dom, f1, x, cfg, ratio, alpha, beta, 0, depth_cap, 1.0, s, c);
    out.steps = c.nodes;
    out.c0 = c.capped;
    out.c1 = c.aborted;
    return out;
  });
  McEstimate e = summarize(samples, &Sample::v0);
  std::uint64_t capped = 0, aborted = 0;
  for (const Sample& s : samples) {
    capped += s.c0;
    aborted += s.c1;
  }
  e.diagnostics["alpha"] = alpha;
  e.diagnostics["beta"] = beta;
  e.diagnostics["depth_cap"] = depth_cap;
  e.diagnostics["ratio"] = ratio;
  e.diagnostics["depth_capped_branches"] = static_cast<double>(capped);
  e.diagnostics["aborted_branches"] = static_cast<double>(aborted);
  e.diagnostics["mean_nodes"] = e.mean_steps;
  e.warnings.push_back("experimental estimator: bias and variance are measured, not guaranteed");
  if (aborted > 0) e.warnings.push_back("weight guard dropped " + std::to_string(aborted) + " branches");
  return e;
}

}  // namespace binormal

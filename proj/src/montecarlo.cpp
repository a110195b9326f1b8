#include "levelset/montecarlo.hpp"

#include <cmath>
#include <numbers>

#include "levelset/errors.hpp"
#include "levelset/parallel.hpp"
#include "levelset/philox.hpp"
#include "levelset/special.hpp"

namespace levelset {

namespace {

bool active(double sup, double radius) { return sup > 0.0 && radius > 0.0; }

void require_bounded(const char* name, double sup, double radius) {
  if (!std::isfinite(radius) || !std::isfinite(sup)) {
    throw UnsupportedError(std::string("bounding region: ") + name +
                           " has unbounded support or is unbounded; truncate it first "
                           "(see the truncation experiment)");
  }
}

// Uniform point in the unit ball of R^n; returns its norm.
double sample_unit_ball(UniformStream& g, int n, double* out) {
  if (n == 1) {
    out[0] = 2.0 * g.next() - 1.0;
    return std::abs(out[0]);
  }
  if (n == 2) {
    const double r = std::sqrt(g.next());
    const double t = 2.0 * std::numbers::pi * g.next();
    out[0] = r * std::cos(t);
    out[1] = r * std::sin(t);
    return r;
  }
  double s = 0.0;
  for (int i = 0; i < n; i += 2) {
    const double mag = std::sqrt(-2.0 * std::log1p(-g.next()));
    const double t = 2.0 * std::numbers::pi * g.next();
    out[i] = mag * std::cos(t);
    if (i + 1 < n) out[i + 1] = mag * std::sin(t);
  }
  for (int i = 0; i < n; ++i) s += out[i] * out[i];
  s = std::sqrt(s);
  const double r = std::pow(g.next(), 1.0 / n);
  if (s == 0.0) {
    out[0] = r;
    for (int i = 1; i < n; ++i) out[i] = 0.0;
    return r;
  }
  for (int i = 0; i < n; ++i) out[i] *= r / s;
  return r;
}

bool inside(const double* pt, const Stratum& s, int n) {
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = pt[i] - s.center[i];
    d2 += d * d;
  }
  return d2 <= s.radius * s.radius;
}

}  // namespace

BoundingRegion bounding_region(const TestFunction& u, const TestFunction& v, double p, double lambda) {
  LevelSetQuery{u, v, p, lambda}.validate();
  const int n = u.dimension();
  const auto bu = u.support_ball();
  const auto bv = v.support_ball();
  const double mu = u.sup_norm();
  const double mv = v.sup_norm();
  const bool u_on = active(mu, bu.radius);
  const bool v_on = active(mv, bv.radius);
  if (u_on) require_bounded("u", mu, bu.radius);
  if (v_on) require_bounded("v", mv, bv.radius);

  BoundingRegion region;
  region.dimension = n;
  const double m = (u_on ? mu : 0.0) + (v_on ? mv : 0.0);
  if (m == 0.0) return region;
  region.rho = std::pow(m / lambda, p / n);
  const double kappa = unit_ball_volume(n);
  const double partner = kappa * std::pow(region.rho, n);
  if (u_on) region.strata.push_back({true, bu.center, bu.radius, kappa * std::pow(bu.radius, n) * partner});
  if (v_on) region.strata.push_back({false, bv.center, bv.radius, kappa * std::pow(bv.radius, n) * partner});
  for (const auto& s : region.strata) region.total_volume += s.volume;
  return region;
}

Sample draw_sample(const BoundingRegion& region, std::uint64_t seed, std::uint64_t index) {
  Sample s;
  if (region.strata.empty()) return s;
  const int n = region.dimension;
  if (region.strata.size() == 2) {
    UniformStream pick(seed, 0u, index);
    s.stratum = pick.next() * region.total_volume < region.strata[0].volume ? 0 : 1;
  }
  const Stratum& st = region.strata[static_cast<std::size_t>(s.stratum)];
  UniformStream g(seed, 1u + static_cast<std::uint32_t>(s.stratum), index);
  std::array<double, kMaxDimension> a{};
  std::array<double, kMaxDimension> w{};
  sample_unit_ball(g, n, a.data());
  const double wn = sample_unit_ball(g, n, w.data());
  double* anchor = st.anchor_is_x ? s.x.data() : s.y.data();
  double* partner = st.anchor_is_x ? s.y.data() : s.x.data();
  for (int i = 0; i < n; ++i) {
    anchor[i] = st.center[i] + st.radius * a[i];
    partner[i] = anchor[i] + region.rho * w[i];
  }
  s.distance = region.rho * wn;
  if (region.strata.size() == 2) {
    const Stratum& other = region.strata[static_cast<std::size_t>(1 - s.stratum)];
    const double* other_anchor = other.anchor_is_x ? s.x.data() : s.y.data();
    if (inside(other_anchor, other, n)) s.multiplicity = 2;
  }
  return s;
}

bool in_level_set(const LevelSetQuery& q, const Sample& s) {
  const double a = std::abs(q.u.eval(s.x.data()) + q.v.eval(s.y.data()));
  const double e = static_cast<double>(q.dimension()) / q.p;
  const double threshold = q.lambda * (e == 1.0 ? s.distance : std::pow(s.distance, e));
  return !(a < threshold);
}

namespace kernels {

HitCounts count_hits_serial(const LevelSetQuery& q, const BoundingRegion& region, std::uint64_t n_samples,
                            std::uint64_t seed) {
  HitCounts c;
  if (region.strata.empty()) return c;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const Sample s = draw_sample(region, seed, i);
    if (in_level_set(q, s)) (s.multiplicity == 1 ? c.single : c.shared) += 1;
  }
  return c;
}

HitCounts count_hits_parallel(const LevelSetQuery& q, const BoundingRegion& region, std::uint64_t n_samples,
                              std::uint64_t seed) {
  if (region.strata.empty()) return {};
  std::uint64_t single = 0;
  std::uint64_t shared = 0;
  const auto n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static) reduction(+ : single, shared) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) {
    const Sample s = draw_sample(region, seed, static_cast<std::uint64_t>(i));
    if (in_level_set(q, s)) {
      if (s.multiplicity == 1)
        ++single;
      else
        ++shared;
    }
  }
  return {single, shared};
}

}  // namespace kernels

MeasureEstimate estimate_measure(const LevelSetQuery& q, std::uint64_t n_samples, std::uint64_t seed) {
  q.validate();
  if (n_samples == 0) throw UsageError("estimate_measure: n_samples must be positive");
  const auto region = bounding_region(q.u, q.v, q.p, q.lambda);
  MeasureEstimate est;
  est.samples = n_samples;
  est.seed = seed;
  est.region_volume = region.total_volume;
  if (region.strata.empty()) return est;
  const auto c = kernels::count_hits_parallel(q, region, n_samples, seed);
  const double n = static_cast<double>(n_samples);
  const double hits = static_cast<double>(c.single) + 0.5 * static_cast<double>(c.shared);
  est.hit_fraction = hits / n;
  est.value = region.total_volume * est.hit_fraction;
  est.std_error = region.total_volume * std::sqrt(est.hit_fraction * (1.0 - est.hit_fraction) / n);
  return est;
}

std::vector<SweepPoint> estimate_sweep(const TestFunction& u, const TestFunction& v, double p,
                                       const std::vector<double>& lambda_grid, std::uint64_t n_samples,
                                       std::uint64_t seed) {
  if (lambda_grid.empty()) throw UsageError("estimate_sweep: empty lambda grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0) || !std::isfinite(lambda_grid[i]))
      throw UsageError("estimate_sweep: lambda values must be positive and finite");
    if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
      throw UsageError("estimate_sweep: lambda grid must be strictly decreasing");
  }
  std::vector<SweepPoint> out;
  out.reserve(lambda_grid.size());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const LevelSetQuery q{u, v, p, lambda_grid[i]};
    out.push_back({lambda_grid[i], estimate_measure(q, n_samples, sweep_seed(seed, i))});
  }
  return out;
}

}  // namespace levelset

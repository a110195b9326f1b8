#include "levelset/weaknorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levelset/errors.hpp"
#include "levelset/measure.hpp"
#include "levelset/montecarlo.hpp"
#include "levelset/special.hpp"

namespace levelset {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - golden ratio

bool vanishes(const TestFunction& f) { return f.kind() == FunctionKind::Zero || f.sup_norm() == 0.0; }

// Common random numbers: every lambda reuses the seed, which keeps the
// profile smooth in lambda and avoids the upward bias of maximizing
// independent noisy values.
double evaluate_at(WeakNormEstimate& out, const TestFunction& u, const TestFunction& v, double p, double lambda,
                       std::uint64_t n_samples, std::uint64_t seed) {
  const auto est = estimate_measure({u, v, p, lambda}, n_samples, seed);
  const double lp = std::pow(lambda, p);
  WeakNormPoint pt{lambda, lp * est.value, lp * est.std_error};
  out.profile.push_back(pt);
  if (out.profile.size() == 1 || pt.lambda_p_measure > out.value_p_power) {
    out.value_p_power = pt.lambda_p_measure;
    out.std_error = pt.std_error;
    out.argmax_lambda = lambda;
  }
  return pt.lambda_p_measure;
}

}  // namespace

void extend_weak_quasinorm(WeakNormEstimate& w, const TestFunction& u, const TestFunction& v, double p,
                           const std::vector<double>& lambdas, std::uint64_t n_samples, std::uint64_t seed) {
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("weak quasinorm: lambda values must be positive and finite");
    if (std::find(w.grid_used.begin(), w.grid_used.end(), l) != w.grid_used.end()) continue;
    w.grid_used.push_back(l);
    evaluate_at(w, u, v, p, l, n_samples, seed);
  }
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw UsageError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, b - (b - a) * i / (n - 1));
  return g;
}

std::vector<double> default_lambda_grid() { return log_grid(1e-4, 1e4, 33); }

std::optional<double> closed_form_weak_quasinorm_p_power(const TestFunction& u, const TestFunction& v, double p) {
  if (!vanishes(u) && !vanishes(v)) return std::nullopt;
  const TestFunction& f = vanishes(v) ? u : v;
  return unit_ball_volume(u.dimension()) * f.lp_norm_p_power(p);
}

WeakNormEstimate weak_quasinorm_p_power(const TestFunction& u, const TestFunction& v, double p,
                                        const std::vector<double>& lambda_grid, std::uint64_t n_samples,
                                        std::uint64_t seed, int refine_rounds) {
  if (lambda_grid.size() < 2) throw UsageError("weak quasinorm: lambda grid needs at least two points");
  if (refine_rounds < 0) throw UsageError("weak quasinorm: refine_rounds must be >= 0");
  for (double l : lambda_grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("weak quasinorm: lambda values must be positive and finite");
  const auto [lo, hi] = std::minmax_element(lambda_grid.begin(), lambda_grid.end());
  if (*hi / *lo < 1e4 * (1.0 - 1e-9)) throw UsageError("weak quasinorm: lambda grid must span at least 4 decades");

  WeakNormEstimate out;
  out.grid_used = lambda_grid;
  try {
    out.lower_bound_from_limit = unit_ball_volume(u.dimension()) * (u.lp_norm_p_power(p) + v.lp_norm_p_power(p));
  } catch (const UnsupportedError&) {
    out.lower_bound_from_limit = std::numeric_limits<double>::quiet_NaN();
  }

  auto eval = [&](double lambda) { return evaluate_at(out, u, v, p, lambda, n_samples, seed); };

  std::vector<double> sorted = lambda_grid;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> values(sorted.size());
  for (double l : lambda_grid) {
    const double val = eval(l);
    values[static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin())] = val;
  }
  if (refine_rounds == 0 || out.value_p_power == 0.0) return out;

  // Golden-section search in log(lambda) around the highest strict local
  // maximum of the grid profile; flat plateaus (heart-like tails) carry no
  // information about where an interior peak sits.
  std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  bool found = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double left = i > 0 ? values[i - 1] : -1.0;
    const double right = i + 1 < values.size() ? values[i + 1] : -1.0;
    const bool peak = values[i] >= left && values[i] >= right && (values[i] > left || values[i] > right) &&
                      i > 0 && i + 1 < values.size();
    if (peak && (!found || values[i] > values[best])) {
      best = i;
      found = true;
    }
  }
  double a = std::log(sorted[best == 0 ? 0 : best - 1]);
  double b = std::log(sorted[std::min(best + 1, sorted.size() - 1)]);
  double c = std::log(sorted[best]);
  double fc = values[best];
  for (int round = 0; round < refine_rounds; ++round) {
    const bool right = (b - c) >= (c - a);
    const double d = right ? c + kGolden * (b - c) : c - kGolden * (c - a);
    if (!(std::abs(d - c) > 1e-12)) break;
    const double lambda = std::exp(d);
    out.grid_used.push_back(lambda);
    const double fd = eval(lambda);
    if (fd > fc) {
      (right ? a : b) = c;
      c = d;
      fc = fd;
    } else {
      (right ? b : a) = d;
    }
  }
  return out;
}

double root_std_error(const QuasinormValue& w, double p) {
  const double base = std::max(w.p_power, 0.0);
  return std::pow(base + w.std_error, 1.0 / p) - std::pow(base, 1.0 / p);
}

Verdict check_quasi_triangle(const QuasinormValue& f, const QuasinormValue& g, const QuasinormValue& sum, double p,
                             double sigmas) {
  const double c = std::pow(2.0, p - 1.0);
  const double root = 1.0 / p;
  const double lhs = std::pow(std::max(sum.p_power, 0.0), root);
  const double rhs = c * (std::pow(std::max(f.p_power, 0.0), root) + std::pow(std::max(g.p_power, 0.0), root));
  const double sf = root_std_error(f, p);
  const double sg = root_std_error(g, p);
  const double ss = root_std_error(sum, p);
  const double tol = sigmas * std::sqrt(ss * ss + c * c * (sf * sf + sg * sg));
  return at_most("quasi-triangle", lhs, rhs, tol);
}

Verdict check_monotone(const QuasinormValue& f, const QuasinormValue& g, double p, double sigmas) {
  const double root = 1.0 / p;
  const double lhs = std::pow(std::max(f.p_power, 0.0), root);
  const double rhs = std::pow(std::max(g.p_power, 0.0), root);
  const double sf = root_std_error(f, p);
  const double sg = root_std_error(g, p);
  return at_most("monotone", lhs, rhs, sigmas * std::hypot(sf, sg));
}

}  // namespace levelset

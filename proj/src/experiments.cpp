#include "levelset/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "levelset/errors.hpp"
#include "levelset/measure.hpp"
#include "levelset/montecarlo.hpp"
#include "levelset/quadrature.hpp"
#include "levelset/special.hpp"
#include "levelset/weaknorm.hpp"

namespace levelset {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool vanishes(const TestFunction& f) { return f.kind() == FunctionKind::Zero || f.sup_norm() == 0.0; }

double limit_target(const TestFunction& u, const TestFunction& v, double p) {
  return unit_ball_volume(u.dimension()) * (u.lp_norm_p_power(p) + v.lp_norm_p_power(p));
}

std::string tag(const char* what, double x) { return std::string(what) + "=" + format_double(x); }

void check_pair(const TestFunction& u, const TestFunction& v, double p) {
  if (u.dimension() != v.dimension()) throw UsageError("u and v must have the same dimension");
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("p must be a finite real >= 1");
}

void check_positive(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw UsageError(std::string(what) + " must not be empty");
  for (double x : xs)
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError(std::string(what) + " values must be positive and finite");
}

void check_decreasing(const std::vector<double>& xs, const char* what) {
  check_positive(xs, what);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) throw UsageError(std::string(what) + " must be strictly decreasing");
}

json pair_inputs(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n, std::uint64_t seed,
                 const Tolerances& tol) {
  return json{{"u", u.to_spec()},     {"v", v.to_spec()}, {"N", u.dimension()},
              {"p", number(p)},       {"samples", n},      {"seed", seed},
              {"tolerances", tol.to_json()}};
}

// Rounding floor for comparisons whose statistical error can be exactly zero.
double floor_tol(const Tolerances& tol, double scale) { return tol.roundoff_rel * std::max(1.0, std::abs(scale)); }

json weak_profile_json(const WeakNormEstimate& w) {
  json rows = json::array();
  for (const auto& pt : w.profile)
    rows.push_back({{"lambda", number(pt.lambda)},
                    {"lambda_p_measure", number(pt.lambda_p_measure)},
                    {"std_error", number(pt.std_error)}});
  return json{{"value_p_power", number(w.value_p_power)},
              {"std_error", number(w.std_error)},
              {"argmax_lambda", number(w.argmax_lambda)},
              {"lower_bound_from_limit", number(w.lower_bound_from_limit)},
              {"profile", rows}};
}

// Profile rows in decreasing lambda; `measure` is lambda^{-p} times the profile value.
std::vector<SweepRow> weak_rows(const WeakNormEstimate& w, double p, double target, double lo, double hi, bool pass) {
  std::vector<SweepRow> rows;
  for (const auto& pt : w.profile) {
    const double lp = std::pow(pt.lambda, p);
    rows.push_back({pt.lambda, pt.lambda_p_measure / lp, pt.std_error / lp, pt.lambda_p_measure, target, lo, hi, pass});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.lambda > b.lambda; });
  return rows;
}

WeakNormEstimate weak_estimate(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n,
                               std::uint64_t seed, const WeakNormSettings& wn) {
  return weak_quasinorm_p_power(u, v, p, wn.grid.empty() ? default_lambda_grid() : wn.grid, n, seed,
                                wn.refine_rounds);
}

json weak_settings_json(const WeakNormSettings& wn) {
  return json{{"grid", numbers(wn.grid.empty() ? default_lambda_grid() : wn.grid)},
              {"refine_rounds", wn.refine_rounds}};
}

}  // namespace

json Tolerances::to_json() const {
  return json{{"sigmas", number(sigmas)},
              {"limit_rel", number(limit_rel)},
              {"truncation_rel", number(truncation_rel)},
              {"tail_term_max", number(tail_term_max)},
              {"volume_budget", number(volume_budget)},
              {"roundoff_rel", number(roundoff_rel)}};
}

std::vector<double> default_lambda_schedule() {
  std::vector<double> s;
  for (int k = 0; k <= 10; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

double origin_support_radius(const TestFunction& u, const TestFunction& v) {
  double R = 0.0;
  for (const TestFunction* f : {&u, &v}) {
    if (vanishes(*f)) continue;
    const auto ball = f->support_ball();
    if (!std::isfinite(ball.radius)) return kInf;
    double c2 = 0.0;
    for (double c : ball.center) c2 += c * c;
    R = std::max(R, std::sqrt(c2) + ball.radius);
  }
  return R;
}

std::pair<double, double> envelope_bounds(double target, int n, double p, double R, double lambda) {
  const double kappa = unit_ball_volume(n);
  const double w = std::pow(lambda, p) * kappa * kappa * std::pow(R, 2.0 * n);
  return {target - 2.0 * w, target + w};
}

// ---------------------------------------------------------------------------

double truncation_radius(const TestFunction& u, const TestFunction& v, double p, double rel) {
  const double total = u.lp_norm_p_power(p) + v.lp_norm_p_power(p);
  if (!std::isfinite(total)) throw PreconditionError("truncation needs finite L^p norms");
  for (double R = 1.0; R <= 1e4; R += 0.5) {
    if (u.tail_lp_norm_p_power(R, p) + v.tail_lp_norm_p_power(R, p) <= rel * total) return R;
  }
  throw UnsupportedError("no truncation radius up to 1e4 meets the tail budget");
}

ExperimentResult verify_heart(const TestFunction& u, double p, const std::vector<double>& lambdas,
                              std::uint64_t n_samples, std::uint64_t seed, const Tolerances& tol) {
  Stopwatch clock;
  check_pair(u, u, p);
  check_positive(lambdas, "lambda list");
  const auto zero = TestFunction::zero(u.dimension());
  const double norm = u.lp_norm_p_power(p);
  if (!std::isfinite(norm)) throw PreconditionError("verify-heart needs ||u||_p finite");
  const double target = unit_ball_volume(u.dimension()) * norm;

  // Unbounded supports are cut at a radius whose tail is negligible against the target.
  TestFunction w = u;
  double R = kNaN;
  if (!vanishes(u) && !std::isfinite(u.support_radius())) {
    R = truncation_radius(u, zero, p, 1e-9);
    w = TestFunction::truncated(R, u);
  }

  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "verify-heart";
  rep.inputs = pair_inputs(u, zero, p, n_samples, seed, tol);
  rep.inputs["lambdas"] = numbers(lambdas);
  rep.inputs["truncation_radius"] = number(R);
  json pts = json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    const double lp = std::pow(lambda, p);
    const auto direct = estimate_measure({w, zero, p, lambda}, n_samples, sweep_seed(seed, i));
    const auto swapped = estimate_measure({zero, w, p, lambda}, n_samples, sweep_seed(seed, i + lambdas.size()));
    const double a = lp * direct.value;
    const double b = lp * swapped.value;
    const double band = tol.sigmas * lp * direct.std_error + floor_tol(tol, target);
    rep.verdicts.push_back(within(tag("heart lambda", lambda), a, target, band));
    rep.verdicts.push_back(within(tag("swapped lambda", lambda), b, a,
                                  tol.sigmas * lp * std::hypot(direct.std_error, swapped.std_error) +
                                      floor_tol(tol, target)));
    out.rows.push_back({lambda, direct.value, direct.std_error, a, target, target - band, target + band,
                        rep.verdicts[rep.verdicts.size() - 2].pass});
    pts.push_back({{"lambda", number(lambda)},
                   {"lambda_p_measure", number(a)},
                   {"std_error", number(lp * direct.std_error)},
                   {"swapped_lambda_p_measure", number(b)},
                   {"swapped_std_error", number(lp * swapped.std_error)}});
  }
  rep.results = {{"target", number(target)}, {"points", pts}};
  rep.wall_time_seconds = clock.seconds();
  return out;
}

// ---------------------------------------------------------------------------

SweepResult limit_sweep(const TestFunction& u, const TestFunction& v, double p,
                        const std::vector<double>& lambda_schedule, std::uint64_t n_samples, std::uint64_t seed,
                        const Tolerances& tol) {
  check_pair(u, v, p);
  check_decreasing(lambda_schedule, "lambda schedule");
  if ((!vanishes(u) && !std::isfinite(u.support_radius())) || (!vanishes(v) && !std::isfinite(v.support_radius())))
    throw PreconditionError("limit sweep needs compactly supported u and v; use the truncation study instead");

  SweepResult out;
  std::vector<double> kept;
  for (double lambda : lambda_schedule) {
    const double vol = bounding_region(u, v, p, lambda).total_volume;
    if (vol > tol.volume_budget) {
      out.warnings.push_back("schedule truncated at lambda=" + format_double(lambda) + ": region volume " +
                             format_double(vol) + " exceeds budget " + format_double(tol.volume_budget));
      break;
    }
    kept.push_back(lambda);
  }
  if (kept.size() < 2) throw PreconditionError("fewer than two lambdas fit in the volume budget");

  out.analytic_target = limit_target(u, v, p);
  out.support_radius = origin_support_radius(u, v);
  const int n = u.dimension();
  const auto sweep = estimate_sweep(u, v, p, kept, n_samples, seed);
  for (const auto& pt : sweep) {
    const double lp = std::pow(pt.lambda, p);
    const double y = lp * pt.estimate.value;
    const double s = lp * pt.estimate.std_error;
    out.pairs.push_back({pt.lambda, y, s});
    double lo = kNaN, hi = kNaN;
    std::optional<bool> pass;
    if (std::isfinite(out.support_radius)) {
      std::tie(lo, hi) = envelope_bounds(out.analytic_target, n, p, out.support_radius, pt.lambda);
      pass = y >= lo - tol.sigmas * s && y <= hi + tol.sigmas * s;
    }
    out.envelope_pass.push_back(pass);
    out.rows.push_back({pt.lambda, pt.estimate.value, pt.estimate.std_error, y, out.analytic_target, lo, hi,
                        pass.value_or(true)});
  }

  // Least squares a + b x, x = lambda^p, on the smallest lambdas.
  const std::size_t m = std::min<std::size_t>(5, out.pairs.size());
  const std::size_t first = out.pairs.size() - m;
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = first; i < out.pairs.size(); ++i) {
    xbar += std::pow(out.pairs[i].lambda, p) / m;
    ybar += out.pairs[i].lambda_p_measure / m;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < out.pairs.size(); ++i) {
    const double dx = std::pow(out.pairs[i].lambda, p) - xbar;
    sxx += dx * dx;
    sxy += dx * (out.pairs[i].lambda_p_measure - ybar);
  }
  out.fit_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  out.extrapolated_limit = ybar - out.fit_slope * xbar;
  double var = 0.0, rss = 0.0;
  for (std::size_t i = first; i < out.pairs.size(); ++i) {
    const double x = std::pow(out.pairs[i].lambda, p);
    const double w = 1.0 / m - (sxx > 0.0 ? xbar * (x - xbar) / sxx : 0.0);
    var += w * w * out.pairs[i].std_error * out.pairs[i].std_error;
    const double r = out.pairs[i].lambda_p_measure - (out.extrapolated_limit + out.fit_slope * x);
    rss += r * r;
  }
  out.extrapolated_std_error = std::sqrt(var);
  out.fit_residual = std::sqrt(rss / m);
  return out;
}

namespace {

json sweep_json(const SweepResult& s) {
  json pairs = json::array();
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    pairs.push_back({{"lambda", number(s.pairs[i].lambda)},
                     {"lambda_p_measure", number(s.pairs[i].lambda_p_measure)},
                     {"std_error", number(s.pairs[i].std_error)},
                     {"envelope_pass", s.envelope_pass[i] ? json(*s.envelope_pass[i]) : json(nullptr)}});
  }
  const double last_rel = s.analytic_target > 0.0 ? s.pairs.back().std_error / s.analytic_target : 0.0;
  return json{{"pairs", pairs},
              {"extrapolated_limit", number(s.extrapolated_limit)},
              {"extrapolated_std_error", number(s.extrapolated_std_error)},
              {"fit_slope", number(s.fit_slope)},
              {"fit_residual", number(s.fit_residual)},
              {"analytic_target", number(s.analytic_target)},
              {"support_radius", number(s.support_radius)},
              {"smallest_lambda_rel_std_error", number(last_rel)},
              {"warnings", s.warnings}};
}

ExperimentResult sweep_report(const char* name, const TestFunction& u, const TestFunction& v, double p,
                              const std::vector<double>& schedule, std::uint64_t n, std::uint64_t seed,
                              const Tolerances& tol, double target) {
  Stopwatch clock;
  const auto s = limit_sweep(u, v, p, schedule, n, seed, tol);
  ExperimentResult out;
  out.report.experiment = name;
  out.report.inputs = pair_inputs(u, v, p, n, seed, tol);
  out.report.inputs["lambda_schedule"] = numbers(schedule);
  out.report.results = sweep_json(s);
  out.report.results["target"] = number(target);
  out.report.verdicts.push_back(within("extrapolated limit", s.extrapolated_limit, target,
                                       std::max(tol.limit_rel * std::abs(target), floor_tol(tol, target))));
  out.rows = s.rows;
  for (auto& r : out.rows) r.target = target;
  out.report.wall_time_seconds = clock.seconds();
  return out;
}

}  // namespace

ExperimentResult limit_report(const TestFunction& u, const TestFunction& v, double p,
                              const std::vector<double>& lambda_schedule, std::uint64_t n_samples,
                              std::uint64_t seed, const Tolerances& tol) {
  check_pair(u, v, p);
  return sweep_report("sweep", u, v, p, lambda_schedule, n_samples, seed, tol, limit_target(u, v, p));
}

ExperimentResult gy_reduction(const TestFunction& u, double p, const std::vector<double>& lambda_schedule,
                              std::uint64_t n_samples, std::uint64_t seed, const Tolerances& tol) {
  check_pair(u, u, p);
  const double target = 2.0 * unit_ball_volume(u.dimension()) * u.lp_norm_p_power(p);
  return sweep_report("gy", u, TestFunction::negated(u), p, lambda_schedule, n_samples, seed, tol, target);
}

// ---------------------------------------------------------------------------

ExperimentResult envelope_check(const TestFunction& u, const TestFunction& v, double p, double R,
                                const std::vector<double>& lambdas, std::uint64_t n_samples, std::uint64_t seed,
                                const Tolerances& tol) {
  Stopwatch clock;
  check_pair(u, v, p);
  check_positive(lambdas, "lambda list");
  if (!(R > 0.0) || !std::isfinite(R)) throw UsageError("envelope radius R must be positive and finite");
  const double needed = origin_support_radius(u, v);
  if (needed > R * (1.0 + 1e-12))
    throw PreconditionError("supports of u and v are not inside B_R: need R >= " + format_double(needed));

  const int n = u.dimension();
  const double target = limit_target(u, v, p);
  constexpr double kGridH = 1e-3;
  constexpr double kGridMaxHalfwidth = 40.0;

  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "envelope";
  rep.inputs = pair_inputs(u, v, p, n_samples, seed, tol);
  rep.inputs["R"] = number(R);
  rep.inputs["lambdas"] = numbers(lambdas);
  json pts = json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    const double lp = std::pow(lambda, p);
    const auto est = estimate_measure({u, v, p, lambda}, n_samples, sweep_seed(seed, i));
    const double y = lp * est.value;
    const double s = lp * est.std_error;
    const auto [lo, hi] = envelope_bounds(target, n, p, R, lambda);
    const double band = tol.sigmas * s + floor_tol(tol, target);
    const bool pass = y >= lo - band && y <= hi + band;
    rep.verdicts.push_back({tag("envelope lambda", lambda), pass, y, std::min(std::max(y, lo), hi), band});
    json pt{{"lambda", number(lambda)}, {"lambda_p_measure", number(y)}, {"std_error", number(s)},
            {"envelope_lo", number(lo)}, {"envelope_hi", number(hi)}, {"grid", nullptr}};
    if (n == 1) {
      const LevelSetQuery q{u, v, p, lambda};
      const double half = required_grid_halfwidth(q, kGridH) + kGridH;
      if (half <= kGridMaxHalfwidth) {
        const double g = lp * grid_bruteforce_measure(q, half, kGridH).measure;
        pt["grid"] = number(g);
        rep.verdicts.push_back({tag("grid envelope lambda", lambda), g >= lo && g <= hi, g,
                                std::min(std::max(g, lo), hi), 0.0});
      }
    }
    pts.push_back(pt);
    out.rows.push_back({lambda, est.value, est.std_error, y, target, lo, hi, pass});
  }
  rep.results = {{"target", number(target)}, {"points", pts}};
  rep.wall_time_seconds = clock.seconds();
  return out;
}

// ---------------------------------------------------------------------------

ExperimentResult sandwich_check(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n_samples,
                                std::uint64_t seed, const Tolerances& tol, const WeakNormSettings& wn) {
  Stopwatch clock;
  check_pair(u, v, p);
  const double nu = u.lp_norm_p_power(p);
  const double nv = v.lp_norm_p_power(p);
  if (!std::isfinite(nu) || !std::isfinite(nv)) throw PreconditionError("sandwich check needs finite L^p norms");
  const double kappa = unit_ball_volume(u.dimension());
  const auto w = weak_estimate(u, v, p, n_samples, seed, wn);
  const double lower = kappa * (nu + nv);
  const double upper_root =
      std::pow(2.0, p - 1.0) * std::pow(kappa, 1.0 / p) * (std::pow(nu, 1.0 / p) + std::pow(nv, 1.0 / p));
  const double root = std::pow(w.value_p_power, 1.0 / p);

  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "sandwich";
  rep.inputs = pair_inputs(u, v, p, n_samples, seed, tol);
  rep.inputs["weak_norm"] = weak_settings_json(wn);
  rep.verdicts.push_back(
      at_least("lower: W >= kappa (|u|^p + |v|^p)", w.value_p_power, lower,
               tol.sigmas * w.std_error + floor_tol(tol, lower)));
  rep.verdicts.push_back(at_most("upper: W^(1/p) <= 2^(p-1) kappa^(1/p) (|u| + |v|)", root, upper_root,
                                 tol.sigmas * root_std_error(w.value(), p) + floor_tol(tol, upper_root)));
  rep.results = {{"W", weak_profile_json(w)},
                 {"W_root", number(root)},
                 {"lower", number(lower)},
                 {"upper_root", number(upper_root)}};
  out.rows = weak_rows(w, p, lower, lower, std::pow(upper_root, p), rep.passed());
  rep.wall_time_seconds = clock.seconds();
  return out;
}

ExperimentResult corollary_forms(const TestFunction& u, double p, std::uint64_t n_samples, std::uint64_t seed,
                                 const Tolerances& tol, const WeakNormSettings& wn) {
  Stopwatch clock;
  check_pair(u, u, p);
  if (!vanishes(u) && !std::isfinite(u.support_radius()))
    throw PreconditionError("corollary forms need a compactly supported u");
  const double norm = u.lp_norm_p_power(p);
  const double kappa = unit_ball_volume(u.dimension());
  const auto au = TestFunction::abs_value(u);
  auto minus = weak_estimate(au, TestFunction::negated(au), p, n_samples, seed, wn);
  auto plus = weak_estimate(au, au, p, n_samples, seed, wn);
  // The ordering compares two sups; take both over the same lambda set.
  const auto minus_grid = minus.grid_used;
  extend_weak_quasinorm(minus, au, TestFunction::negated(au), p, plus.grid_used, n_samples, seed);
  extend_weak_quasinorm(plus, au, au, p, minus_grid, n_samples, seed);
  const double lower = 2.0 * kappa * norm;
  const double upper = std::pow(std::pow(2.0, p - 1.0) * 2.0 * std::pow(kappa, 1.0 / p) * std::pow(norm, 1.0 / p), p);

  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "corollary";
  rep.inputs = pair_inputs(u, u, p, n_samples, seed, tol);
  rep.inputs.erase("v");
  rep.inputs["weak_norm"] = weak_settings_json(wn);
  Verdict order = check_monotone(minus.value(), plus.value(), p, tol.sigmas);
  order.name = "ordering: minus-form <= plus-form";
  order.tolerance += floor_tol(tol, upper);
  order.pass = order.measured <= order.target + order.tolerance;
  rep.verdicts.push_back(order);
  rep.verdicts.push_back(at_least("minus-form >= 2 kappa |u|^p", minus.value_p_power, lower,
                                  tol.sigmas * minus.std_error + floor_tol(tol, lower)));
  rep.verdicts.push_back(at_most("plus-form <= (2^(p-1) 2 kappa^(1/p) |u|)^p", plus.value_p_power, upper,
                                 tol.sigmas * plus.std_error + floor_tol(tol, upper)));
  rep.results = {{"minus_form", weak_profile_json(minus)},
                 {"plus_form", weak_profile_json(plus)},
                 {"lower", number(lower)},
                 {"upper", number(upper)}};
  out.rows = weak_rows(minus, p, lower, lower, upper, rep.verdicts[1].pass);
  auto plus_rows = weak_rows(plus, p, upper, lower, upper, rep.verdicts[2].pass);
  out.rows.insert(out.rows.end(), plus_rows.begin(), plus_rows.end());
  rep.wall_time_seconds = clock.seconds();
  return out;
}

// ---------------------------------------------------------------------------

LambdaRule default_lambda_rule(int n, double p) {
  return [n, p](double R) { return std::pow(R, -4.0 * n / p); };
}

double tail_correction_term(double tail_u_p_power, double tail_v_p_power, double p) {
  const double T = tail_u_p_power + tail_v_p_power;
  if (T <= 0.0) return 0.0;
  const double sigma = std::sqrt(T) / (1.0 + std::sqrt(T));
  const double sum = std::pow(tail_u_p_power, 1.0 / p) + std::pow(tail_v_p_power, 1.0 / p);
  return std::pow(sum / sigma, p);
}

std::optional<double> tail_norm_by_quadrature(const TestFunction& f, double R, double p, double tol) {
  if (vanishes(f)) return 0.0;
  const auto view = f.radial();
  if (!view) return std::nullopt;
  if (!view->any_center)
    for (double c : view->center)
      if (c != 0.0) return std::nullopt;
  const int n = f.dimension();
  const double area = unit_sphere_area(n);
  // r = R + t / (1 - t) maps [0, 1) onto [R, inf).
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double r = R + t / (1.0 - t);
    const double val = std::abs(radial_profile(f, *view, r));
    if (val == 0.0) return 0.0;
    return area * std::pow(r, n - 1) * std::pow(val, p) / ((1.0 - t) * (1.0 - t));
  };
  std::vector<double> pts;
  for (double j : view->jumps)
    if (j > R) pts.push_back((j - R) / (1.0 + j - R));
  const auto bp = quad::breakpoints(std::move(pts), 0.0, 1.0);
  const auto res = quad::integrate_pieces(g, bp, tol);
  return res.value;
}

ExperimentResult truncation_study(const TestFunction& u, const TestFunction& v, double p,
                                  const std::vector<double>& R_schedule, std::uint64_t n_samples,
                                  std::uint64_t seed, const Tolerances& tol, LambdaRule rule) {
  Stopwatch clock;
  check_pair(u, v, p);
  check_positive(R_schedule, "R schedule");
  for (std::size_t i = 1; i < R_schedule.size(); ++i)
    if (!(R_schedule[i] > R_schedule[i - 1])) throw UsageError("R schedule must be strictly increasing");
  const int n = u.dimension();
  if (!rule) rule = default_lambda_rule(n, p);
  const double target = limit_target(u, v, p);
  if (!std::isfinite(target)) throw PreconditionError("truncation study needs finite L^p norms");

  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "truncation";
  rep.inputs = pair_inputs(u, v, p, n_samples, seed, tol);
  rep.inputs["R_schedule"] = numbers(R_schedule);
  rep.inputs["lambda_rule"] = "lambda = R^(-4N/p)";
  json pts = json::array();
  std::vector<double> terms;
  double last = 0.0, last_se = 0.0;
  for (std::size_t i = 0; i < R_schedule.size(); ++i) {
    const double R = R_schedule[i];
    const double lambda = rule(R);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("lambda rule must give positive finite values");
    const double lp = std::pow(lambda, p);
    const auto est = estimate_measure({TestFunction::truncated(R, u), TestFunction::truncated(R, v), p, lambda},
                                      n_samples, sweep_seed(seed, i));
    last = lp * est.value;
    last_se = lp * est.std_error;
    const double tu = u.tail_lp_norm_p_power(R, p);
    const double tv = v.tail_lp_norm_p_power(R, p);
    const auto qu = tail_norm_by_quadrature(u, R, p, 1e-13);
    const auto qv = tail_norm_by_quadrature(v, R, p, 1e-13);
    if (qu) rep.verdicts.push_back(within(tag("tail quadrature u R", R), *qu, tu, 1e-10));
    if (qv) rep.verdicts.push_back(within(tag("tail quadrature v R", R), *qv, tv, 1e-10));
    const double term = tail_correction_term(tu, tv, p);
    terms.push_back(term);
    const double band = tol.truncation_rel * std::abs(target) + floor_tol(tol, target);
    out.rows.push_back({lambda, est.value, est.std_error, last, target, target - band, target + band,
                        std::abs(last - target) <= band});
    pts.push_back({{"R", number(R)},
                   {"lambda", number(lambda)},
                   {"lambda_p_measure", number(last)},
                   {"std_error", number(last_se)},
                   {"tail_u_p_power", number(tu)},
                   {"tail_v_p_power", number(tv)},
                   {"tail_u_quadrature", qu ? number(*qu) : json(nullptr)},
                   {"tail_v_quadrature", qv ? number(*qv) : json(nullptr)},
                   {"tail_correction_term", number(term)},
                   {"lambda_p_R_2N", number(lp * std::pow(R, 2.0 * n))}});
  }
  rep.verdicts.push_back(within(tag("converged at R", R_schedule.back()), last, target,
                                tol.truncation_rel * std::abs(target) + floor_tol(tol, target)));
  bool nonincreasing = true;
  for (std::size_t i = 1; i < terms.size(); ++i) nonincreasing = nonincreasing && terms[i] <= terms[i - 1];
  Verdict tail = at_most("tail correction term -> 0", terms.back(), tol.tail_term_max, 0.0);
  tail.pass = tail.pass && nonincreasing;
  rep.verdicts.push_back(tail);
  rep.results = {{"target", number(target)}, {"points", pts}, {"tail_term_nonincreasing", nonincreasing}};
  rep.wall_time_seconds = clock.seconds();
  return out;
}

// ---------------------------------------------------------------------------

ExperimentResult measure_report(const TestFunction& u, const TestFunction& v, double p, double lambda,
                                const std::string& method, std::uint64_t n_samples, std::uint64_t seed,
                                double grid_h, double quad_tol) {
  Stopwatch clock;
  check_pair(u, v, p);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be positive and finite");
  const LevelSetQuery q{u, v, p, lambda};
  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "measure";
  rep.inputs = pair_inputs(u, v, p, n_samples, seed, Tolerances{});
  rep.inputs.erase("tolerances");
  rep.inputs["lambda"] = number(lambda);
  rep.inputs["method"] = method;
  rep.inputs["grid_h"] = number(grid_h);
  rep.inputs["quad_tol"] = number(quad_tol);

  double value = 0.0, err = kNaN;
  std::string used;
  auto run_mc = [&] {
    const auto est = estimate_measure(q, n_samples, seed);
    value = est.value;
    err = est.std_error;
    used = "mc";
  };
  if (method == "exact") {
    value = exact_single_measure(q).measure;
    err = 0.0;
    used = "exact";
  } else if (method == "quadrature") {
    const auto m = radial_quadrature_measure(q, quad_tol);
    value = m.measure;
    err = m.error_bound.value_or(kNaN);
    used = "quadrature";
  } else if (method == "grid") {
    value = grid_bruteforce_measure(q, required_grid_halfwidth(q, grid_h) + grid_h, grid_h).measure;
    used = "grid";
  } else if (method == "mc") {
    run_mc();
  } else if (method == "auto") {
    if (vanishes(u) || vanishes(v)) {
      value = exact_single_measure(q).measure;
      err = 0.0;
      used = "exact";
    } else {
      try {
        const auto m = radial_quadrature_measure(q, quad_tol);
        value = m.measure;
        err = m.error_bound.value_or(kNaN);
        used = "quadrature";
      } catch (const UnsupportedError&) {
        run_mc();
      }
    }
  } else {
    throw UsageError("unknown method '" + method + "' (expected auto, exact, quadrature, grid or mc)");
  }
  const double lp = std::pow(lambda, p);
  rep.results = {{"measure", number(value)},
                 {"lambda_p_measure", number(lp * value)},
                 {"error", number(err)},
                 {"method_used", used}};
  out.rows.push_back({lambda, value, err, lp * value, kNaN, kNaN, kNaN, true});
  rep.wall_time_seconds = clock.seconds();
  return out;
}

ExperimentResult weaknorm_report(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n_samples,
                                 std::uint64_t seed, const Tolerances& tol, const WeakNormSettings& wn) {
  Stopwatch clock;
  check_pair(u, v, p);
  const auto w = weak_estimate(u, v, p, n_samples, seed, wn);
  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "weaknorm";
  rep.inputs = pair_inputs(u, v, p, n_samples, seed, tol);
  rep.inputs["weak_norm"] = weak_settings_json(wn);
  rep.results = {{"W", weak_profile_json(w)}, {"W_root", number(std::pow(w.value_p_power, 1.0 / p))}};
  const double lower = w.lower_bound_from_limit;
  if (std::isfinite(lower))
    rep.verdicts.push_back(at_least("W >= kappa (|u|^p + |v|^p)", w.value_p_power, lower,
                                    tol.sigmas * w.std_error + floor_tol(tol, lower)));
  out.rows = weak_rows(w, p, lower, lower, kNaN, rep.passed());
  rep.wall_time_seconds = clock.seconds();
  return out;
}

ExperimentResult gagliardo_report(const TestFunction& u, double s, double p, double quad_tol) {
  Stopwatch clock;
  const auto g = gagliardo_seminorm_p_power(u, s, p, quad_tol);
  ExperimentResult out;
  Report& rep = out.report;
  rep.experiment = "gagliardo";
  rep.inputs = {{"u", u.to_spec()}, {"N", u.dimension()}, {"s", number(s)}, {"p", number(p)}, {"tol", number(quad_tol)}};
  rep.results = {{"value", number(g.value)},
                 {"infinite", g.infinite},
                 {"band_ratio", number(g.band_ratio)},
                 {"tail", number(g.tail)},
                 {"bands", g.bands},
                 {"error_estimate", number(g.error_estimate)}};
  rep.wall_time_seconds = clock.seconds();
  return out;
}

}  // namespace levelset

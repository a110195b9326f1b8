#pragma once

// Orchestrated checks of the level-set identities: heart identity, lambda -> 0
// limit, two-sided envelope, Gu-Yung reduction, sandwich bounds, the
// |u(x)| -+ |u(y)| forms, and the truncation argument for unbounded supports.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levelset/functions.hpp"
#include "levelset/report.hpp"

namespace levelset {

/// Defaults follow the design: 3 sigma for statistical identities, 2% for
/// extrapolated limits. Everything is echoed into the reports.
struct Tolerances {
  double sigmas = 3.0;
  double limit_rel = 0.02;
  double truncation_rel = 0.03;
  double tail_term_max = 0.01;      ///< last tail-correction term must fall below this
  double volume_budget = 1e9;       ///< bounding-region volume cap for sweeps
  double roundoff_rel = 1e-12;      ///< floor added to zero-variance comparisons
  nlohmann::json to_json() const;
};

/// Report plus the per-row table written as CSV.
struct ExperimentResult {
  Report report;
  std::vector<SweepRow> rows;
};

/// {2^-k : k = 0..10}
std::vector<double> default_lambda_schedule();

struct SweepResult {
  struct Pair {
    double lambda = 0.0;
    double lambda_p_measure = 0.0;
    double std_error = 0.0;
  };
  std::vector<Pair> pairs;                ///< decreasing lambda
  double extrapolated_limit = 0.0;        ///< intercept a of a + b lambda^p
  double extrapolated_std_error = 0.0;    ///< propagated from the per-point errors
  double fit_slope = 0.0;
  double fit_residual = 0.0;              ///< RMS residual of the fit
  double analytic_target = 0.0;           ///< kappa_N (||u||_p^p + ||v||_p^p)
  std::vector<std::optional<bool>> envelope_pass;  ///< per pair; nullopt when no finite R bounds the supports
  double support_radius = 0.0;            ///< smallest R with supp u, supp v in B_R (about the origin)
  std::vector<std::string> warnings;
  std::vector<SweepRow> rows;
};

/// Radius of the smallest origin-centered ball containing both supports.
double origin_support_radius(const TestFunction& u, const TestFunction& v);

/// [kappa (|u|^p + |v|^p) - 2 lambda^p kappa^2 R^{2N}, kappa (...) + lambda^p kappa^2 R^{2N}]
std::pair<double, double> envelope_bounds(double target, int n, double p, double R, double lambda);

ExperimentResult verify_heart(const TestFunction& u, double p, const std::vector<double>& lambdas,
                              std::uint64_t n_samples, std::uint64_t seed, const Tolerances& tol = {});

/// Sweep on a decreasing schedule and least-squares fit of a + b lambda^p on the
/// five smallest lambdas. Points whose bounding region exceeds the volume
/// budget are dropped together with every smaller lambda, with a warning.
SweepResult limit_sweep(const TestFunction& u, const TestFunction& v, double p,
                        const std::vector<double>& lambda_schedule, std::uint64_t n_samples, std::uint64_t seed,
                        const Tolerances& tol = {});

/// limit_sweep wrapped in a report with the 2% verdict against the analytic target.
ExperimentResult limit_report(const TestFunction& u, const TestFunction& v, double p,
                              const std::vector<double>& lambda_schedule, std::uint64_t n_samples,
                              std::uint64_t seed, const Tolerances& tol = {});

ExperimentResult envelope_check(const TestFunction& u, const TestFunction& v, double p, double R,
                                const std::vector<double>& lambdas, std::uint64_t n_samples, std::uint64_t seed,
                                const Tolerances& tol = {});

ExperimentResult gy_reduction(const TestFunction& u, double p, const std::vector<double>& lambda_schedule,
                              std::uint64_t n_samples, std::uint64_t seed, const Tolerances& tol = {});

/// Weak-quasinorm estimates use this grid and refinement unless overridden.
struct WeakNormSettings {
  std::vector<double> grid;   ///< empty: default_lambda_grid()
  int refine_rounds = 6;
};

ExperimentResult sandwich_check(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n_samples,
                                std::uint64_t seed, const Tolerances& tol = {}, const WeakNormSettings& wn = {});

ExperimentResult corollary_forms(const TestFunction& u, double p, std::uint64_t n_samples, std::uint64_t seed,
                                 const Tolerances& tol = {}, const WeakNormSettings& wn = {});

using LambdaRule = std::function<double(double R)>;

/// lambda = R^{-4N/p}
LambdaRule default_lambda_rule(int n, double p);

/// sigma = sqrt(T) / (1 + sqrt(T)), T = ||u_E||^p + ||v_E||^p; the correction
/// term (||u_E|| + ||v_E||)^p / sigma^p with c3 = 1 (0 when both tails vanish).
double tail_correction_term(double tail_u_p_power, double tail_v_p_power, double p);

/// Tail norm int_{|x| > R} |f|^p by the library quadrature (radial functions only).
std::optional<double> tail_norm_by_quadrature(const TestFunction& f, double R, double p, double tol);

ExperimentResult truncation_study(const TestFunction& u, const TestFunction& v, double p,
                                  const std::vector<double>& R_schedule, std::uint64_t n_samples,
                                  std::uint64_t seed, const Tolerances& tol = {}, LambdaRule rule = {});

/// Smallest R in {1, 1.5, 2, ...} with kappa (tail_u + tail_v) <= rel * kappa (|u|^p + |v|^p).
double truncation_radius(const TestFunction& u, const TestFunction& v, double p, double rel);

// Single-quantity reports used by the command line.

/// method: "auto" (exact, then radial quadrature, then Monte Carlo), "exact",
/// "quadrature", "grid" (N = 1) or "mc".
ExperimentResult measure_report(const TestFunction& u, const TestFunction& v, double p, double lambda,
                                const std::string& method, std::uint64_t n_samples, std::uint64_t seed,
                                double grid_h, double quad_tol);

/// Weak quasinorm with the lower-bound consistency verdict W >= kappa (|u|^p + |v|^p) - 3 sigma.
ExperimentResult weaknorm_report(const TestFunction& u, const TestFunction& v, double p, std::uint64_t n_samples,
                                 std::uint64_t seed, const Tolerances& tol = {}, const WeakNormSettings& wn = {});

/// Gagliardo seminorm diagnostic; no verdicts.
ExperimentResult gagliardo_report(const TestFunction& u, double s, double p, double quad_tol);

}  // namespace levelset

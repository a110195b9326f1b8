#pragma once

// Weak-L^p quasinorm of (u(x) + v(y)) / |x - y|^{N/p} over R^N x R^N,
//   [F]^p = sup_lambda lambda^p |E_lambda|,
// the quasi-triangle and monotonicity checks, and the Gagliardo seminorm.

#include <cstdint>
#include <optional>
#include <vector>

#include "levelset/functions.hpp"
#include "levelset/report.hpp"

namespace levelset {

/// A p-th power [F]^p with its standard error.
struct QuasinormValue {
  double p_power = 0.0;
  double std_error = 0.0;
};

struct WeakNormPoint {
  double lambda = 0.0;
  double lambda_p_measure = 0.0;
  double std_error = 0.0;  ///< of lambda_p_measure
};

struct WeakNormEstimate {
  double value_p_power = 0.0;  ///< max of lambda^p * estimate over every evaluated lambda
  double std_error = 0.0;      ///< lambda^p * stderr at the argmax
  double argmax_lambda = 1.0;
  std::vector<double> grid_used;        ///< the input grid followed by refinement points
  double lower_bound_from_limit = 0.0;  ///< kappa_N (||u||_p^p + ||v||_p^p); NaN when not closed-form
  std::vector<WeakNormPoint> profile;   ///< in evaluation order

  QuasinormValue value() const { return {value_p_power, std_error}; }
};

/// n log-spaced points from hi down to lo.
std::vector<double> log_grid(double lo, double hi, int n);

/// 33 log-spaced points over [1e-4, 1e4], descending.
std::vector<double> default_lambda_grid();

/// Evaluates lambda^p * estimate_measure on the grid with common random
/// numbers (one seed for every lambda), then runs `refine_rounds` golden-section
/// steps in log(lambda) around the running argmax. The grid must span at least
/// four decades.
WeakNormEstimate weak_quasinorm_p_power(const TestFunction& u, const TestFunction& v, double p,
                                        const std::vector<double>& lambda_grid, std::uint64_t n_samples,
                                        std::uint64_t seed, int refine_rounds = 0);

/// Adds the lambdas not yet evaluated (same seed), updating the sup. Used to
/// put estimates that are compared against each other on a common lambda set.
void extend_weak_quasinorm(WeakNormEstimate& w, const TestFunction& u, const TestFunction& v, double p,
                           const std::vector<double>& lambdas, std::uint64_t n_samples, std::uint64_t seed);

/// kappa_N ||f||_p^p when one of u, v vanishes: lambda^p |E_lambda| is then
/// constant in lambda, so the sup is attained everywhere. nullopt otherwise.
std::optional<double> closed_form_weak_quasinorm_p_power(const TestFunction& u, const TestFunction& v, double p);

/// Standard error of W^{1/p} propagated from that of W, as the one-sided
/// difference (W + sigma)^{1/p} - W^{1/p} (well defined at W = 0).
double root_std_error(const QuasinormValue& w, double p);

/// [f + g] <= 2^{p-1} ([f] + [g]) on the p-th roots, with a combined
/// `sigmas`-standard-error tolerance.
Verdict check_quasi_triangle(const QuasinormValue& f, const QuasinormValue& g, const QuasinormValue& sum, double p,
                             double sigmas = 3.0);

/// [f] <= [g] for |f| <= |g| pointwise, on the p-th roots.
Verdict check_monotone(const QuasinormValue& f, const QuasinormValue& g, double p, double sigmas = 3.0);

struct GagliardoResult {
  double value = 0.0;       ///< +infinity when `infinite`
  bool infinite = false;    ///< the near-diagonal bands fail to converge
  double band_ratio = 0.0;  ///< ratio of consecutive near-diagonal band integrals
  double tail = 0.0;        ///< extrapolated contribution of |x - y| below the last band
  int bands = 0;
  double error_estimate = 0.0;
};

/// Integral of |u(x) - u(y)|^p / |x - y|^{N + s p} over R^N x R^N for N = 1
/// (any bounded catalog function) or N = 2 (radial, bounded). Written as
/// |S^{N-1}| * int_0^inf t^{-1-sp} Phi(t) dt with Phi(t) = ||u(. + t e1) - u||_p^p;
/// the part t < eps is integrated over halving bands whose ratio decides
/// between a geometric tail and divergence.
GagliardoResult gagliardo_seminorm_p_power(const TestFunction& u, double s, double p, double tol);

/// Phi(t) = int |u(x + t e1) - u(x)|^p dx, exposed for testing.
double translation_difference_p_power(const TestFunction& u, double t, double p, double tol);

}  // namespace levelset

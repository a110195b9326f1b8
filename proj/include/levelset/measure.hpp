#pragma once

// Deterministic oracles for the 2N-dimensional Lebesgue measure of
//   E_lambda = {(x, y) : |u(x) + v(y)| >= lambda |x - y|^{N/p}}.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "levelset/functions.hpp"

namespace levelset {

enum class Method { Exact, Quadrature, Grid, MonteCarlo };

std::string_view to_string(Method m);

struct LevelSetQuery {
  TestFunction u;
  TestFunction v;
  double p = 1.0;
  double lambda = 1.0;

  int dimension() const { return u.dimension(); }
  /// Throws UsageError unless dimensions agree, p >= 1 and lambda > 0.
  void validate() const;
  /// (v, u): the reflected set (x, y) -> (y, x), which has the same measure.
  LevelSetQuery swapped() const { return {v, u, p, lambda}; }
};

struct MeasureValue {
  double measure = 0.0;                ///< may be +infinity
  Method method = Method::Exact;
  std::optional<double> error_bound;   ///< nullopt when no bound is computable
};

/// kappa_N * ||u||_p^p / lambda^p, exact for every lambda when one of the two
/// functions vanishes identically.
MeasureValue exact_single_measure(const LevelSetQuery& q);

/// Radially reduced adaptive quadrature for pairs radial about a common center
/// (N <= 3). The angular measure is computed in closed form, leaving a nested
/// 2D integral over |x| and |y|.
MeasureValue radial_quadrature_measure(const LevelSetQuery& q, double tol);

/// Smallest box half-width the grid oracle accepts for this query and cell size.
double required_grid_halfwidth(const LevelSetQuery& q, double h);

/// Midpoint-rule cell count for N = 1 over [-box, box]^2 with cell side h. The
/// y cells are offset by h/2 so no cell center lies on the diagonal x = y.
MeasureValue grid_bruteforce_measure(const LevelSetQuery& q, double box_halfwidth, double h);

namespace kernels {

/// Inputs of the grid count: u at the x centers, v at the y centers and the
/// threshold lambda * |x_i - y_j|^{N/p}, indexed by i - j + n - 1.
struct GridInputs {
  std::vector<double> ux;
  std::vector<double> vy;
  std::vector<double> threshold;
  std::int64_t band = 0;  ///< |i - j| beyond band never hits
};

GridInputs make_grid_inputs(const LevelSetQuery& q, double box_halfwidth, double h);

/// Per-row hit counts combined in row order. Both variants return identical totals.
std::int64_t grid_count_serial(const GridInputs& in);
std::int64_t grid_count_parallel(const GridInputs& in);

}  // namespace kernels

}  // namespace levelset

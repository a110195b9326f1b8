#pragma once

// Stratified hit-or-miss Monte Carlo for the measure of E_lambda over a
// certified bounding region.

#include <array>
#include <cstdint>
#include <vector>

#include "levelset/functions.hpp"
#include "levelset/measure.hpp"

namespace levelset {

/// One stratum: the anchor point (x for the x-side, y for the y-side) ranges
/// over a ball, the partner lies within `rho` of the anchor.
struct Stratum {
  bool anchor_is_x = true;
  std::vector<double> center;
  double radius = 0.0;
  double volume = 0.0;
};

struct BoundingRegion {
  int dimension = 1;
  double rho = 0.0;
  std::vector<Stratum> strata;  ///< at most one x-side and one y-side stratum
  double total_volume = 0.0;
};

/// Union {x in B_u, |x - y| <= rho} U {y in B_v, |x - y| <= rho} with
/// rho = ((M_u + M_v) / lambda)^{p/N}. Contains E_lambda up to a null set.
/// Throws UnsupportedError for unbounded support or unbounded functions.
BoundingRegion bounding_region(const TestFunction& u, const TestFunction& v, double p, double lambda);

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double region_volume = 0.0;
  double hit_fraction = 0.0;  ///< multiplicity-weighted

  double band95_lo() const { return value - 1.96 * std_error; }
  double band95_hi() const { return value + 1.96 * std_error; }
};

struct Sample {
  std::array<double, kMaxDimension> x{};
  std::array<double, kMaxDimension> y{};
  double distance = 0.0;     ///< |x - y|
  int stratum = 0;
  int multiplicity = 1;      ///< number of strata containing (x, y)
};

/// The index-th sample point for a seed; a pure function of its arguments.
Sample draw_sample(const BoundingRegion& region, std::uint64_t seed, std::uint64_t index);

/// Defining inequality |u(x) + v(y)| >= lambda |x - y|^{N/p}; infinite or NaN
/// sums count as hits.
bool in_level_set(const LevelSetQuery& q, const Sample& s);

MeasureEstimate estimate_measure(const LevelSetQuery& q, std::uint64_t n_samples, std::uint64_t seed);

struct SweepPoint {
  double lambda = 0.0;
  MeasureEstimate estimate;
};

/// Per-lambda sub-seed: seed XOR index. Philox keys differing in any bit give
/// independent streams, so no further mixing is applied.
inline std::uint64_t sweep_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

/// One independent estimate per lambda of a strictly decreasing positive grid.
std::vector<SweepPoint> estimate_sweep(const TestFunction& u, const TestFunction& v, double p,
                                       const std::vector<double>& lambda_grid, std::uint64_t n_samples,
                                       std::uint64_t seed);

namespace kernels {

struct HitCounts {
  std::uint64_t single = 0;  ///< hits inside exactly one stratum
  std::uint64_t shared = 0;  ///< hits inside both strata (weight 1/2)
  bool operator==(const HitCounts&) const = default;
};

HitCounts count_hits_serial(const LevelSetQuery& q, const BoundingRegion& region, std::uint64_t n_samples,
                            std::uint64_t seed);
HitCounts count_hits_parallel(const LevelSetQuery& q, const BoundingRegion& region, std::uint64_t n_samples,
                              std::uint64_t seed);

}  // namespace kernels

}  // namespace levelset

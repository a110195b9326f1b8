#pragma once

// Run configuration and its TOML form. Only the subset the configuration
// needs is understood: `key = value` lines with strings, numbers, booleans and
// flat numeric arrays, `#` comments, and one level of `[table]`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levelset/experiments.hpp"

namespace levelset {

struct RunConfig {
  std::string command;
  std::string u;
  std::string v;                ///< empty: the zero function of u's dimension
  int n = 0;                    ///< 0: taken from u
  double p = 1.0;
  std::vector<double> lambdas;  ///< lambda list or schedule; empty: command default
  double lambda = 1.0;          ///< measure
  std::vector<double> radii;    ///< truncation R schedule; empty: {2, 3, 4}
  double R = 0.0;               ///< envelope radius; 0: smallest origin ball covering both supports
  double s = 0.5;               ///< gagliardo
  double quad_tol = 1e-8;
  std::string method = "auto";  ///< measure
  double grid_h = 1e-3;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  int refine = 6;
  int threads = 0;              ///< 0: LEVELSET_THREADS or machine parallelism
  std::optional<std::vector<int>> criteria;  ///< all; unset: every criterion
  std::string out_dir;
  std::string json_path;
  std::string csv_path;
  Tolerances tol;

  bool operator==(const RunConfig& o) const;
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names = {"catalog", "measure",  "sweep",    "weaknorm",   "verify-heart",
                                                 "envelope", "gy",      "sandwich", "corollary",  "truncation",
                                                 "all",      "gagliardo"};
  return names;
}

std::string to_toml(const RunConfig& c);
/// Throws UsageError naming the line for malformed input, unknown keys and type mismatches.
RunConfig config_from_toml(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

/// Range and consistency checks that need no computation: command, function
/// specs, p, lists, sample counts, methods and output locations.
void validate(const RunConfig& c);

}  // namespace levelset

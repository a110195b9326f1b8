#pragma once

// The ten acceptance criteria as runnable checks. Sample counts, pairs and
// tolerances are pinned here so that every run is comparable.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace levelset {

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  /// (file stem, CSV text) for every sweep table produced.
  std::vector<std::pair<std::string, std::string>> tables;
};

inline constexpr int kCriterionCount = 10;

CriterionOutcome run_criterion(int id, std::uint64_t seed = 42);

/// Runs the given criteria in order, calling `on_done` after each one.
std::vector<CriterionOutcome> run_acceptance(const std::vector<int>& ids, std::uint64_t seed = 42,
                                             const std::function<void(const CriterionOutcome&)>& on_done = {});

/// "PASS  3  Gu-Yung reduction: ... (1.2 s)"
std::string format_outcome(const CriterionOutcome& c);

}  // namespace levelset

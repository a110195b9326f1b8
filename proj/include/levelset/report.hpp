#pragma once

// Experiment reports (JSON) and sweep tables (CSV).

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace levelset {

inline constexpr const char* kVersion = "1.0.0";

struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool operator==(const Verdict&) const;
};

/// Verdict for `measured <= bound + tolerance`.
Verdict at_most(std::string name, double measured, double bound, double tolerance);
/// Verdict for `measured >= bound - tolerance`.
Verdict at_least(std::string name, double measured, double bound, double tolerance);
/// Verdict for `|measured - target| <= tolerance`.
Verdict within(std::string name, double measured, double target, double tolerance);

struct Report {
  std::string experiment;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  double wall_time_seconds = 0.0;
  std::string version = kVersion;

  bool passed() const;
  bool operator==(const Report&) const = default;
};

/// JSON number, or the strings "inf", "-inf", "nan" for non-finite values.
nlohmann::json number(double v);
/// Inverse of number(); throws UsageError on anything else.
double to_double(const nlohmann::json& j);
nlohmann::json numbers(const std::vector<double>& v);

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// 17 significant digits, so every value reparses to the same double.
std::string format_double(double v);

struct SweepRow {
  double lambda = 0.0;
  double measure = 0.0;
  double std_error = 0.0;
  double lambda_p_measure = 0.0;
  double target = 0.0;
  double envelope_lo = 0.0;
  double envelope_hi = 0.0;
  bool pass = false;
  bool operator==(const SweepRow&) const = default;
};

inline constexpr const char* kSweepCsvHeader =
    "lambda,measure,stderr,lambda_p_measure,target,envelope_lo,envelope_hi,pass";

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws std::runtime_error when the path is not writable.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace levelset

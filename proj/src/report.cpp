#include "levelset/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "levelset/errors.hpp"

namespace levelset {

using nlohmann::json;

namespace {

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw UsageError("not a number: '" + s + "'");
  return v;
}

}  // namespace

bool Verdict::operator==(const Verdict& o) const {
  return name == o.name && pass == o.pass && same_double(measured, o.measured) && same_double(target, o.target) &&
         same_double(tolerance, o.tolerance);
}

Verdict at_most(std::string name, double measured, double bound, double tolerance) {
  return {std::move(name), measured <= bound + tolerance, measured, bound, tolerance};
}

Verdict at_least(std::string name, double measured, double bound, double tolerance) {
  return {std::move(name), measured >= bound - tolerance, measured, bound, tolerance};
}

Verdict within(std::string name, double measured, double target, double tolerance) {
  return {std::move(name), std::abs(measured - target) <= tolerance, measured, target, tolerance};
}

bool Report::passed() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw UsageError("expected a number, got " + j.dump());
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json to_json(const Report& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"measured", number(v.measured)},
                        {"target", number(v.target)},
                        {"tolerance", number(v.tolerance)}});
  }
  return {{"experiment", r.experiment},      {"inputs", r.inputs},
          {"results", r.results},            {"verdicts", verdicts},
          {"wall_time_seconds", number(r.wall_time_seconds)}, {"version", r.version}};
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.experiment = j.at("experiment").get<std::string>();
    r.inputs = j.at("inputs");
    r.results = j.at("results");
    for (const auto& v : j.at("verdicts")) {
      r.verdicts.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>(), to_double(v.at("measured")),
                            to_double(v.at("target")), to_double(v.at("tolerance"))});
    }
    r.wall_time_seconds = to_double(j.at("wall_time_seconds"));
    r.version = j.at("version").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    for (double v : {r.lambda, r.measure, r.std_error, r.lambda_p_measure, r.target, r.envelope_lo, r.envelope_hi}) {
      out += format_double(v);
      out += ',';
    }
    out += r.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) throw UsageError("sweep CSV: unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw UsageError("sweep CSV: expected 8 columns in '" + line + "'");
    if (cells[7] != "true" && cells[7] != "false") throw UsageError("sweep CSV: bad pass flag '" + cells[7] + "'");
    rows.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]), parse_double(cells[3]),
                    parse_double(cells[4]), parse_double(cells[5]), parse_double(cells[6]), cells[7] == "true"});
  }
  return rows;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot write " + path.string() + ": " + ec.message());
  }
}

}  // namespace levelset

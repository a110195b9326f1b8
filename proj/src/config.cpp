#include "levelset/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include "levelset/errors.hpp"
#include "levelset/functions.hpp"

namespace levelset {

namespace {

namespace fs = std::filesystem;

// --- writing ----------------------------------------------------------------

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

template <class T>
std::string array(const std::vector<T>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out + "]";
}

// --- reading ----------------------------------------------------------------

using Array = std::vector<double>;
using Value = std::variant<std::string, double, bool, Array>;

struct Entry {
  Value value;
  int line = 0;
  bool integral = false;  // number written without fraction or exponent
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw UsageError("config line " + std::to_string(line) + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Removes a trailing comment, leaving '#' inside strings alone.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_str && ch == '\\') {
      ++i;
    } else if (ch == '"') {
      in_str = !in_str;
    } else if (ch == '#' && !in_str) {
      return line.substr(0, i);
    }
  }
  return line;
}

double parse_number(const std::string& tok, int line, bool* integral) {
  std::string t = tok;
  t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan" || t == "+nan" || t == "-nan") return std::numeric_limits<double>::quiet_NaN();
  const char* b = t.data();
  if (!t.empty() && t[0] == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) fail(line, "expected a value, found '" + tok + "'");
  if (integral) *integral = t.find_first_of(".eE") == std::string::npos;
  return v;
}

std::string parse_string(const std::string& tok, int line) {
  if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"') fail(line, "unterminated string " + tok);
  std::string out;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    char ch = tok[i];
    if (ch == '\\') {
      if (i + 2 >= tok.size()) fail(line, "dangling escape in string");
      const char e = tok[++i];
      switch (e) {
        case '"': ch = '"'; break;
        case '\\': ch = '\\'; break;
        case 'n': ch = '\n'; break;
        case 't': ch = '\t'; break;
        default: fail(line, std::string("unknown escape \\") + e);
      }
    } else if (ch == '"') {
      fail(line, "unexpected quote inside string");
    }
    out += ch;
  }
  return out;
}

Entry parse_value(const std::string& raw, int line) {
  const std::string tok = trim(raw);
  if (tok.empty()) fail(line, "missing value");
  Entry e;
  e.line = line;
  if (tok.front() == '"') {
    e.value = parse_string(tok, line);
  } else if (tok == "true" || tok == "false") {
    e.value = tok == "true";
  } else if (tok.front() == '[') {
    if (tok.back() != ']') fail(line, "unterminated array");
    Array xs;
    std::stringstream ss(tok.substr(1, tok.size() - 2));
    std::string item;
    bool all_int = true;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) {
        if (ss.eof()) break;  // trailing comma
        fail(line, "empty array element");
      }
      bool integral = false;
      xs.push_back(parse_number(t, line, &integral));
      all_int = all_int && integral;
    }
    e.value = xs;
    e.integral = all_int;
  } else {
    bool integral = false;
    e.value = parse_number(tok, line, &integral);
    e.integral = integral;
  }
  return e;
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "a string";
    case 1: return "a number";
    case 2: return "a boolean";
    default: return "an array";
  }
}

template <class T>
const T& get(const Entry& e, const std::string& key, const char* want) {
  if (!std::holds_alternative<T>(e.value))
    fail(e.line, "'" + key + "' must be " + want + ", found " + type_name(e.value));
  return std::get<T>(e.value);
}

template <class Int>
Int get_integer(const Entry& e, const std::string& key) {
  const double v = get<double>(e, key, "an integer");
  if (!e.integral || !(v >= static_cast<double>(std::numeric_limits<Int>::min())) ||
      !(v <= static_cast<double>(std::numeric_limits<Int>::max())))
    fail(e.line, "'" + key + "' must be an integer in range");
  return static_cast<Int>(v);
}

std::uint64_t get_u64(const Entry& e, const std::string& key, const std::string& raw) {
  get<double>(e, key, "an integer");
  // Parsed again from the text: 64-bit seeds do not survive a trip through double.
  std::uint64_t v = 0;
  std::string t = trim(raw);
  t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) fail(e.line, "'" + key + "' must be a non-negative integer");
  return v;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  auto same_list = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same);
  };
  const Tolerances& t = tol;
  const Tolerances& q = o.tol;
  return command == o.command && u == o.u && v == o.v && n == o.n && same(p, o.p) && same_list(lambdas, o.lambdas) &&
         same(lambda, o.lambda) && same_list(radii, o.radii) && same(R, o.R) && same(s, o.s) &&
         same(quad_tol, o.quad_tol) && method == o.method && same(grid_h, o.grid_h) && samples == o.samples &&
         seed == o.seed && refine == o.refine && threads == o.threads && criteria == o.criteria &&
         out_dir == o.out_dir && json_path == o.json_path && csv_path == o.csv_path && same(t.sigmas, q.sigmas) &&
         same(t.limit_rel, q.limit_rel) && same(t.truncation_rel, q.truncation_rel) &&
         same(t.tail_term_max, q.tail_term_max) && same(t.volume_budget, q.volume_budget) &&
         same(t.roundoff_rel, q.roundoff_rel);
}

std::string to_toml(const RunConfig& c) {
  std::ostringstream o;
  o << "command = " << quote(c.command) << "\n"
    << "u = " << quote(c.u) << "\n"
    << "v = " << quote(c.v) << "\n"
    << "n = " << c.n << "\n"
    << "p = " << format_double(c.p) << "\n"
    << "lambdas = " << array(c.lambdas) << "\n"
    << "lambda = " << format_double(c.lambda) << "\n"
    << "radii = " << array(c.radii) << "\n"
    << "R = " << format_double(c.R) << "\n"
    << "s = " << format_double(c.s) << "\n"
    << "quad_tol = " << format_double(c.quad_tol) << "\n"
    << "method = " << quote(c.method) << "\n"
    << "grid_h = " << format_double(c.grid_h) << "\n"
    << "samples = " << c.samples << "\n"
    << "seed = " << c.seed << "\n"
    << "refine = " << c.refine << "\n"
    << "threads = " << c.threads << "\n";
  if (c.criteria) o << "criteria = " << array(*c.criteria) << "\n";
  o << "out_dir = " << quote(c.out_dir) << "\n"
    << "json = " << quote(c.json_path) << "\n"
    << "csv = " << quote(c.csv_path) << "\n"
    << "\n[tolerances]\n"
    << "sigmas = " << format_double(c.tol.sigmas) << "\n"
    << "limit_rel = " << format_double(c.tol.limit_rel) << "\n"
    << "truncation_rel = " << format_double(c.tol.truncation_rel) << "\n"
    << "tail_term_max = " << format_double(c.tol.tail_term_max) << "\n"
    << "volume_budget = " << format_double(c.tol.volume_budget) << "\n"
    << "roundoff_rel = " << format_double(c.tol.roundoff_rel) << "\n";
  return o.str();
}

RunConfig config_from_toml(const std::string& text) {
  std::map<std::string, std::pair<Entry, std::string>> entries;  // "table.key" -> (value, raw text)
  std::string table;
  std::istringstream in(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const std::string s = trim(strip_comment(raw_line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) fail(line, "malformed table header " + s);
      table = trim(s.substr(1, s.size() - 2));
      if (table != "tolerances") fail(line, "unknown table [" + table + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "missing key");
    const std::string raw = s.substr(eq + 1);
    const std::string full = table.empty() ? key : table + "." + key;
    if (entries.count(full)) fail(line, "duplicate key '" + full + "'");
    entries.emplace(full, std::make_pair(parse_value(raw, line), raw));
  }

  RunConfig c;
  for (const auto& [key, er] : entries) {
    const Entry& e = er.first;
    const std::string& raw = er.second;
    auto dbl = [&] { return get<double>(e, key, "a number"); };
    auto list = [&] { return get<Array>(e, key, "an array of numbers"); };
    if (key == "command") c.command = get<std::string>(e, key, "a string");
    else if (key == "u") c.u = get<std::string>(e, key, "a string");
    else if (key == "v") c.v = get<std::string>(e, key, "a string");
    else if (key == "n") c.n = get_integer<int>(e, key);
    else if (key == "p") c.p = dbl();
    else if (key == "lambdas") c.lambdas = list();
    else if (key == "lambda") c.lambda = dbl();
    else if (key == "radii") c.radii = list();
    else if (key == "R") c.R = dbl();
    else if (key == "s") c.s = dbl();
    else if (key == "quad_tol") c.quad_tol = dbl();
    else if (key == "method") c.method = get<std::string>(e, key, "a string");
    else if (key == "grid_h") c.grid_h = dbl();
    else if (key == "samples") c.samples = get_u64(e, key, raw);
    else if (key == "seed") c.seed = get_u64(e, key, raw);
    else if (key == "refine") c.refine = get_integer<int>(e, key);
    else if (key == "threads") c.threads = get_integer<int>(e, key);
    else if (key == "criteria") {
      const auto xs = list();
      if (!e.integral) fail(e.line, "'criteria' must list integers");
      c.criteria = std::vector<int>(xs.begin(), xs.end());
    } else if (key == "out_dir") c.out_dir = get<std::string>(e, key, "a string");
    else if (key == "json") c.json_path = get<std::string>(e, key, "a string");
    else if (key == "csv") c.csv_path = get<std::string>(e, key, "a string");
    else if (key == "tolerances.sigmas") c.tol.sigmas = dbl();
    else if (key == "tolerances.limit_rel") c.tol.limit_rel = dbl();
    else if (key == "tolerances.truncation_rel") c.tol.truncation_rel = dbl();
    else if (key == "tolerances.tail_term_max") c.tol.tail_term_max = dbl();
    else if (key == "tolerances.volume_budget") c.tol.volume_budget = dbl();
    else if (key == "tolerances.roundoff_rel") c.tol.roundoff_rel = dbl();
    else fail(e.line, "unknown key '" + key + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_toml(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"command", c.command},
                      {"u", c.u},
                      {"v", c.v},
                      {"n", c.n},
                      {"p", number(c.p)},
                      {"lambdas", numbers(c.lambdas)},
                      {"lambda", number(c.lambda)},
                      {"radii", numbers(c.radii)},
                      {"R", number(c.R)},
                      {"s", number(c.s)},
                      {"quad_tol", number(c.quad_tol)},
                      {"method", c.method},
                      {"grid_h", number(c.grid_h)},
                      {"samples", c.samples},
                      {"seed", c.seed},
                      {"refine", c.refine},
                      {"threads", c.threads},
                      {"out_dir", c.out_dir},
                      {"json", c.json_path},
                      {"csv", c.csv_path},
                      {"tolerances", c.tol.to_json()}};
  j["criteria"] = c.criteria ? nlohmann::json(*c.criteria) : nlohmann::json(nullptr);
  return j;
}

namespace {

void check_output_file(const std::string& path, const char* what) {
  if (path.empty()) return;
  const fs::path f(path);
  if (fs::is_directory(f)) throw UsageError(std::string(what) + " path is a directory: " + path);
  const fs::path parent = f.parent_path().empty() ? fs::path(".") : f.parent_path();
  if (!fs::is_directory(parent)) throw UsageError(std::string(what) + " directory does not exist: " + parent.string());
}

bool needs_u(const std::string& cmd) { return cmd != "catalog" && cmd != "all"; }

}  // namespace

void validate(const RunConfig& c) {
  if (c.command.empty()) throw UsageError("no command given");
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
    throw UsageError("unknown command '" + c.command + "'");
  if (needs_u(c.command) && c.u.empty()) throw UsageError("--u is required for " + c.command);
  if (!c.u.empty()) {
    const auto u = parse_function(c.u);
    if (c.n != 0 && u.dimension() != c.n)
      throw UsageError("n = " + std::to_string(c.n) + " does not match the dimension of u (" +
                       std::to_string(u.dimension()) + ")");
    if (!c.v.empty() && parse_function(c.v).dimension() != u.dimension())
      throw UsageError("u and v have different dimensions");
  }
  if (c.n < 0 || c.n > 3) throw UsageError("n must be 1, 2 or 3");
  if (!(c.p >= 1.0) || !std::isfinite(c.p)) throw UsageError("p must be a finite real >= 1");
  for (double l : c.lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("lambdas must be positive and finite");
  if ((c.command == "sweep" || c.command == "gy") && !c.lambdas.empty())
    for (std::size_t i = 1; i < c.lambdas.size(); ++i)
      if (!(c.lambdas[i] < c.lambdas[i - 1])) throw UsageError("the lambda schedule must be strictly decreasing");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw UsageError("lambda must be positive and finite");
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    if (!(c.radii[i] > 0.0) || !std::isfinite(c.radii[i])) throw UsageError("radii must be positive and finite");
    if (i > 0 && !(c.radii[i] > c.radii[i - 1])) throw UsageError("the R schedule must be strictly increasing");
  }
  if (!(c.R >= 0.0) || !std::isfinite(c.R)) throw UsageError("R must be >= 0 (0 picks the smallest covering ball)");
  if (!(c.s > 0.0 && c.s < 1.0)) throw UsageError("s must lie in (0, 1)");
  if (!(c.quad_tol > 0.0)) throw UsageError("quad_tol must be positive");
  if (!(c.grid_h > 0.0)) throw UsageError("grid_h must be positive");
  static const std::vector<std::string> methods = {"auto", "exact", "quadrature", "grid", "mc"};
  if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
    throw UsageError("method must be one of auto, exact, quadrature, grid, mc");
  if (c.samples == 0) throw UsageError("samples must be positive");
  if (c.refine < 0) throw UsageError("refine must be >= 0");
  if (c.threads < 0) throw UsageError("threads must be >= 0");
  if (c.criteria) {
    if (c.criteria->empty()) throw UsageError("the experiment list is empty");
    for (int id : *c.criteria)
      if (id < 1 || id > 10) throw UsageError("criteria must be in 1..10");
  }
  const Tolerances& t = c.tol;
  if (!(t.sigmas >= 0.0) || !(t.limit_rel >= 0.0) || !(t.truncation_rel >= 0.0) || !(t.tail_term_max >= 0.0) ||
      !(t.volume_budget > 0.0) || !(t.roundoff_rel >= 0.0))
    throw UsageError("tolerances must be non-negative (volume_budget positive)");
  check_output_file(c.json_path, "json");
  check_output_file(c.csv_path, "csv");
  if (!c.out_dir.empty()) {
    const fs::path d(c.out_dir);
    if (fs::exists(d) && !fs::is_directory(d)) throw UsageError("out_dir exists and is not a directory: " + c.out_dir);
    const fs::path parent = d.parent_path().empty() ? fs::path(".") : d.parent_path();
    if (!fs::exists(d) && !fs::is_directory(parent))
      throw UsageError("parent of out_dir does not exist: " + parent.string());
  }
  if (c.command == "all" && !c.csv_path.empty()) throw UsageError("'all' writes one table per sweep; use --out DIR");
}

}  // namespace levelset

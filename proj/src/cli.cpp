#include "levelset/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "levelset/acceptance.hpp"
#include "levelset/config.hpp"
#include "levelset/errors.hpp"
#include "levelset/experiments.hpp"
#include "levelset/parallel.hpp"
#include "levelset/weaknorm.hpp"

namespace levelset {

namespace {

namespace fs = std::filesystem;

// --- flag values --------------------------------------------------------------

double to_number(const std::string& flag, const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const char* b = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("--" + flag + ": expected a number, found '" + s + "'");
  return v;
}

// Integers also accept exact scientific forms such as 1e6.
template <class Int>
Int to_integer(const std::string& flag, const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return v;
  double d = 0.0;
  try {
    d = to_number(flag, s);
  } catch (const UsageError&) {
    throw UsageError("--" + flag + ": expected an integer, found '" + s + "'");
  }
  if (d != std::floor(d) || d < static_cast<double>(std::numeric_limits<Int>::min()) || d > 9007199254740992.0 ||
      d > static_cast<double>(std::numeric_limits<Int>::max()))
    throw UsageError("--" + flag + ": expected an integer, found '" + s + "'");
  return static_cast<Int>(d);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<double> to_numbers(const std::string& flag, const std::string& s) {
  std::vector<double> xs;
  for (const auto& part : split(s)) xs.push_back(to_number(flag, part));
  return xs;
}

// Every flag is staged as text and applied on top of the config file only when
// it was given, which is what makes flags override file values.
struct Flag {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> apply;
};

std::vector<Flag> flags() {
  using C = RunConfig;
  using S = const std::string&;
  auto num = [](double C::*field, const char* name) {
    return [field, name](C& c, S s) { c.*field = to_number(name, s); };
  };
  auto tol = [](double Tolerances::*field, const char* name) {
    return [field, name](C& c, S s) { c.tol.*field = to_number(name, s); };
  };
  return {
      {"u", "function spec for u, e.g. \"ball a=1 r=1 n=1\"", [](C& c, S s) { c.u = s; }},
      {"v", "function spec for v (default: zero)", [](C& c, S s) { c.v = s; }},
      {"n", "dimension N (checked against --u and --v)", [](C& c, S s) { c.n = to_integer<int>("n", s); }},
      {"p", "exponent p >= 1", num(&C::p, "p")},
      {"lambdas", "comma-separated lambda list, schedule or grid", [](C& c, S s) { c.lambdas = to_numbers("lambdas", s); }},
      {"lambda", "single lambda (measure)", num(&C::lambda, "lambda")},
      {"radii", "comma-separated increasing R schedule (truncation)",
       [](C& c, S s) { c.radii = to_numbers("radii", s); }},
      {"R", "envelope radius (default: smallest covering ball)", num(&C::R, "R")},
      {"s", "fractional order in (0, 1) (gagliardo)", num(&C::s, "s")},
      {"quad-tol", "quadrature tolerance", num(&C::quad_tol, "quad-tol")},
      {"method", "measure method: auto, exact, quadrature, grid, mc", [](C& c, S s) { c.method = s; }},
      {"grid-h", "grid oracle spacing", num(&C::grid_h, "grid-h")},
      {"samples", "Monte Carlo samples per lambda",
       [](C& c, S s) { c.samples = to_integer<std::uint64_t>("samples", s); }},
      {"seed", "random seed", [](C& c, S s) { c.seed = to_integer<std::uint64_t>("seed", s); }},
      {"refine", "golden-section rounds for the weak quasinorm", [](C& c, S s) { c.refine = to_integer<int>("refine", s); }},
      {"threads", "worker count (overrides LEVELSET_THREADS)",
       [](C& c, S s) { c.threads = to_integer<int>("threads", s); }},
      {"criteria", "comma-separated acceptance criteria for 'all'",
       [](C& c, S s) {
         std::vector<int> ids;
         for (const auto& part : split(s)) ids.push_back(to_integer<int>("criteria", part));
         c.criteria = ids;
       }},
      {"out", "directory for <experiment>.json and <experiment>.csv", [](C& c, S s) { c.out_dir = s; }},
      {"json", "JSON report path", [](C& c, S s) { c.json_path = s; }},
      {"csv", "CSV table path", [](C& c, S s) { c.csv_path = s; }},
      {"sigmas", "statistical tolerance in standard errors", tol(&Tolerances::sigmas, "sigmas")},
      {"limit-rel", "relative tolerance for extrapolated limits", tol(&Tolerances::limit_rel, "limit-rel")},
      {"truncation-rel", "relative tolerance for the truncation study",
       tol(&Tolerances::truncation_rel, "truncation-rel")},
      {"tail-term-max", "bound on the last tail-correction term", tol(&Tolerances::tail_term_max, "tail-term-max")},
      {"volume-budget", "cap on the sampling-region volume", tol(&Tolerances::volume_budget, "volume-budget")},
      {"roundoff-rel", "floor for zero-variance comparisons", tol(&Tolerances::roundoff_rel, "roundoff-rel")},
  };
}

std::string type_of(const std::string& flag) {
  if (flag == "u" || flag == "v") return "SPEC";
  if (flag == "lambdas" || flag == "radii" || flag == "criteria") return "LIST";
  if (flag == "method") return "NAME";
  if (flag == "out") return "DIR";
  if (flag == "json" || flag == "csv") return "FILE";
  if (flag == "n" || flag == "samples" || flag == "seed" || flag == "refine" || flag == "threads") return "INT";
  return "NUM";
}

const char* command_help(const std::string& name) {
  static const std::map<std::string, const char*> help = {
      {"catalog", "list the function grammar; with --u, its norms"},
      {"measure", "measure of the level set at one lambda"},
      {"sweep", "lambda -> 0 sweep and extrapolated limit"},
      {"weaknorm", "weak quasinorm sup over lambda"},
      {"verify-heart", "lambda^p measure with v = 0 against kappa ||u||_p^p"},
      {"envelope", "two-sided envelope at each lambda"},
      {"gy", "v = -u reduction, limit 2 kappa ||u||_p^p"},
      {"sandwich", "lower and upper bounds on the weak quasinorm"},
      {"corollary", "the |u(x)| - |u(y)| and |u(x)| + |u(y)| forms"},
      {"truncation", "truncation study over an R schedule"},
      {"all", "run the acceptance suite"},
      {"gagliardo", "Gagliardo seminorm diagnostic"},
  };
  return help.at(name);
}

// --- running ------------------------------------------------------------------

struct Inputs {
  TestFunction u = TestFunction::zero(1);
  TestFunction v = TestFunction::zero(1);
};

Inputs functions_of(const RunConfig& c) {
  Inputs in;
  in.u = parse_function(c.u);
  in.v = c.v.empty() ? TestFunction::zero(in.u.dimension()) : parse_function(c.v);
  return in;
}

nlohmann::json describe(const TestFunction& f, double p) {
  nlohmann::json j = {{"spec", f.to_spec()},
                      {"kind", std::string(to_string(f.kind()))},
                      {"dimension", f.dimension()},
                      {"p", number(p)},
                      {"sup_norm", number(f.sup_norm())},
                      {"support_radius", number(f.support_radius())},
                      {"radial", f.radial().has_value()}};
  try {
    j["lp_norm_p_power"] = number(f.lp_norm_p_power(p));
  } catch (const UnsupportedError&) {
    j["lp_norm_p_power"] = nullptr;
  }
  return j;
}

ExperimentResult catalog(const RunConfig& c) {
  ExperimentResult r;
  r.report.experiment = "catalog";
  r.report.results["grammar"] = {
      "zero n=N",
      "ball a=AMP r=RADIUS n=N",
      "step r=R1,R2,... a=A1,A2,... n=N",
      "gauss a=AMP n=N",
      "power alpha=ALPHA r=RADIUS a=AMP n=N",
      "witness p=P a=AMP n=N",
      "shift(by=X1,X2,... F)",
      "scale(c=FACTOR d=DILATION F)",
      "abs(F)",
      "neg(F)",
      "trunc(r=RADIUS F)",
      "sum(F G)",
  };
  if (!c.u.empty()) r.report.results["function"] = describe(parse_function(c.u), c.p);
  return r;
}

WeakNormSettings weak_settings(const RunConfig& c) { return {c.lambdas, c.refine}; }

ExperimentResult run_experiment(const RunConfig& c) {
  if (c.command == "catalog") return catalog(c);
  const Inputs in = functions_of(c);
  const auto& cmd = c.command;
  const auto schedule = c.lambdas.empty() ? default_lambda_schedule() : c.lambdas;
  if (cmd == "measure")
    return measure_report(in.u, in.v, c.p, c.lambda, c.method, c.samples, c.seed, c.grid_h, c.quad_tol);
  if (cmd == "sweep") return limit_report(in.u, in.v, c.p, schedule, c.samples, c.seed, c.tol);
  if (cmd == "weaknorm") return weaknorm_report(in.u, in.v, c.p, c.samples, c.seed, c.tol, weak_settings(c));
  if (cmd == "verify-heart") {
    if (!c.v.empty() && in.v.kind() != FunctionKind::Zero) throw UsageError("verify-heart takes v = 0; omit --v");
    const auto lambdas = c.lambdas.empty() ? std::vector<double>{0.1, 1.0, 10.0} : c.lambdas;
    return verify_heart(in.u, c.p, lambdas, c.samples, c.seed, c.tol);
  }
  if (cmd == "envelope") {
    const double R = c.R > 0.0 ? c.R : origin_support_radius(in.u, in.v);
    return envelope_check(in.u, in.v, c.p, R, schedule, c.samples, c.seed, c.tol);
  }
  if (cmd == "gy") return gy_reduction(in.u, c.p, schedule, c.samples, c.seed, c.tol);
  if (cmd == "sandwich") return sandwich_check(in.u, in.v, c.p, c.samples, c.seed, c.tol, weak_settings(c));
  if (cmd == "corollary") return corollary_forms(in.u, c.p, c.samples, c.seed, c.tol, weak_settings(c));
  if (cmd == "truncation") {
    const auto radii = c.radii.empty() ? std::vector<double>{2.0, 3.0, 4.0} : c.radii;
    return truncation_study(in.u, in.v, c.p, radii, c.samples, c.seed, c.tol);
  }
  if (cmd == "gagliardo") return gagliardo_report(in.u, c.s, c.p, c.quad_tol);
  throw UsageError("unknown command '" + cmd + "'");
}

void print_verdicts(const Report& r, std::ostream& out) {
  for (const auto& v : r.verdicts)
    out << (v.pass ? "PASS  " : "FAIL  ") << v.name << ": measured " << format_double(v.measured) << ", target "
        << format_double(v.target) << ", tolerance " << format_double(v.tolerance) << "\n";
}

int run_single(const RunConfig& c, std::ostream& out) {
  ExperimentResult r = run_experiment(c);
  r.report.inputs["config"] = to_json(c);
  const std::string json = to_json(r.report).dump(2) + "\n";
  const std::string csv = sweep_csv(r.rows);
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_file_atomic(fs::path(c.out_dir) / (r.report.experiment + ".json"), json);
    if (!r.rows.empty()) write_file_atomic(fs::path(c.out_dir) / (r.report.experiment + ".csv"), csv);
  }
  if (!c.json_path.empty()) write_file_atomic(c.json_path, json);
  if (!c.csv_path.empty()) write_file_atomic(c.csv_path, csv);
  if (c.out_dir.empty() && c.json_path.empty())
    out << json;
  else
    print_verdicts(r.report, out);
  return r.report.passed() ? 0 : 1;
}

int run_all(const RunConfig& c, std::ostream& out) {
  std::vector<int> ids = c.criteria.value_or(std::vector<int>{});
  if (!c.criteria)
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  const auto start = std::chrono::steady_clock::now();
  const auto outcomes = run_acceptance(ids, c.seed, [&](const CriterionOutcome& o) {
    out << format_outcome(o) << "\n";
    out.flush();
  });

  Report rep;
  rep.experiment = "all";
  rep.inputs["config"] = to_json(c);
  rep.results["criteria"] = nlohmann::json::array();
  for (const auto& o : outcomes) {
    rep.results["criteria"].push_back(
        {{"id", o.id}, {"title", o.title}, {"pass", o.pass}, {"detail", o.detail}, {"seconds", number(o.seconds)}});
    rep.verdicts.push_back({"criterion " + std::to_string(o.id) + ": " + o.title, o.pass, o.pass ? 1.0 : 0.0, 1.0, 0.0});
  }
  rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string json = to_json(rep).dump(2) + "\n";
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    for (const auto& o : outcomes)
      for (const auto& [stem, csv] : o.tables) write_file_atomic(fs::path(c.out_dir) / (stem + ".csv"), csv);
    write_file_atomic(fs::path(c.out_dir) / "all.json", json);
  }
  if (!c.json_path.empty()) write_file_atomic(c.json_path, json);
  return rep.passed() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-set measures, weak quasinorms and their limits", "levelset"};
  app.require_subcommand(0, 1);

  const auto table = flags();
  std::map<std::string, std::string> staged;
  std::vector<std::pair<const Flag*, CLI::Option*>> bound;
  for (const auto& f : table)
    bound.emplace_back(&f, app.add_option("--" + f.name, staged[f.name], f.help)->type_name(type_of(f.name)));
  std::string config_path;
  std::string save_path;
  app.add_option("--config", config_path, "TOML config file; flags override its values")->type_name("FILE");
  app.add_option("--save-config", save_path, "write the effective config as TOML before running")->type_name("FILE");
  for (const auto& name : known_commands()) app.add_subcommand(name, command_help(name))->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& [flag, opt] : bound)
      if (opt->count() > 0) flag->apply(cfg, staged[flag->name]);
    const auto chosen = app.get_subcommands();
    if (!chosen.empty()) cfg.command = chosen.front()->get_name();
    if (cfg.command.empty()) {
      err << "error: no command given\n\n" << app.help();
      return 2;
    }
    validate(cfg);
    if (!save_path.empty()) write_file_atomic(save_path, to_toml(cfg));

    set_worker_count(0);
    configure_workers_from_env();
    if (cfg.threads > 0) set_worker_count(cfg.threads);

    return cfg.command == "all" ? run_all(cfg, out) : run_single(cfg, out);
  } catch (const ParseError& e) {
    err << "error: function spec: " << e.what() << "\n";
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "error: precondition: " << e.what() << "\n";
  } catch (const UnsupportedError& e) {
    err << "error: unsupported: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace levelset

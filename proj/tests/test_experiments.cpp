#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levelset/errors.hpp"
#include "levelset/experiments.hpp"
#include "levelset/special.hpp"

using namespace levelset;

namespace {

TestFunction ind(double a, double b, double amp = 1.0) {
  return TestFunction::shifted({0.5 * (a + b)}, TestFunction::ball(1, amp, 0.5 * (b - a)));
}

const TestFunction kZero = TestFunction::zero(1);
constexpr std::uint64_t kSamples = 200000;

bool all_pass(const Report& r) {
  for (const auto& v : r.verdicts)
    if (!v.pass) return false;
  return !r.verdicts.empty();
}

const Verdict* find(const Report& r, const std::string& prefix) {
  for (const auto& v : r.verdicts)
    if (v.name.rfind(prefix, 0) == 0) return &v;
  return nullptr;
}

}  // namespace

TEST_CASE("reports and tables round trip") {
  const auto res = verify_heart(ind(-1, 1), 1.0, {0.1, 1.0, 10.0}, kSamples, 7);
  CHECK(report_from_json(to_json(res.report)) == res.report);
  CHECK(report_from_json(nlohmann::json::parse(to_json(res.report).dump())) == res.report);

  const auto sweep = limit_report(ind(0, 1), ind(4, 5), 1.0, default_lambda_schedule(), kSamples, 3);
  REQUIRE(!sweep.rows.empty());
  const auto text = sweep_csv(sweep.rows);
  CHECK(text.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
  CHECK(parse_sweep_csv(text) == sweep.rows);
  CHECK(sweep_csv(parse_sweep_csv(text)) == text);
  CHECK(report_from_json(to_json(sweep.report)) == sweep.report);
}

TEST_CASE("default schedule") {
  const auto s = default_lambda_schedule();
  REQUIRE(s.size() == 11);
  for (int k = 0; k <= 10; ++k) CHECK(s[static_cast<std::size_t>(k)] == std::ldexp(1.0, -k));
}

TEST_CASE("heart identity is flat in lambda") {
  const auto r = verify_heart(ind(-1, 1), 1.0, {0.1, 1.0, 10.0}, 1000000, 42);
  CHECK(all_pass(r.report));
  for (const auto& pt : r.report.results["points"]) {
    CHECK(to_double(pt["lambda_p_measure"]) == doctest::Approx(4.0).epsilon(0.01));
    CHECK(to_double(pt["swapped_lambda_p_measure"]) == doctest::Approx(4.0).epsilon(0.01));
  }
  CHECK(to_double(r.report.results["target"]) == doctest::Approx(4.0).epsilon(1e-12));

  const auto z = verify_heart(kZero, 1.0, {0.1, 1.0, 10.0}, kSamples, 42);
  CHECK(all_pass(z.report));
  for (const auto& pt : z.report.results["points"]) CHECK(to_double(pt["lambda_p_measure"]) == 0.0);
}

TEST_CASE("heart identity for the Gaussian through truncation") {
  const auto r = verify_heart(TestFunction::gaussian(1), 2.0, {1.0}, 1000000, 42);
  const double target = 2.0 * std::sqrt(std::numbers::pi / 2.0);
  CHECK(to_double(r.report.results["target"]) == doctest::Approx(target).epsilon(1e-9));
  CHECK(to_double(r.report.results["points"][0]["lambda_p_measure"]) == doctest::Approx(target).epsilon(0.01));
  CHECK(all_pass(r.report));
}

TEST_CASE("limit sweep") {
  SUBCASE("separated indicators") {
    const auto s = limit_sweep(ind(0, 1), ind(4, 5), 1.0, default_lambda_schedule(), 1000000, 42);
    CHECK(s.analytic_target == doctest::Approx(4.0));
    CHECK(s.extrapolated_limit == doctest::Approx(4.0).epsilon(0.02));
    CHECK(std::isfinite(s.fit_residual));
    REQUIRE(s.pairs.size() == 11);
    for (std::size_t i = 1; i < s.pairs.size(); ++i) CHECK(s.pairs[i].lambda < s.pairs[i - 1].lambda);
    CHECK(s.support_radius == doctest::Approx(5.0));
    for (const auto& e : s.envelope_pass) CHECK(e.value_or(false));
  }
  SUBCASE("heart pair is flat") {
    const auto s = limit_sweep(ind(-1, 1), kZero, 1.0, default_lambda_schedule(), kSamples, 42);
    for (const auto& pt : s.pairs) CHECK(pt.lambda_p_measure == doctest::Approx(4.0).epsilon(0.01));
    CHECK(s.extrapolated_limit == doctest::Approx(4.0).epsilon(0.01));
  }
  SUBCASE("zero pair") {
    const auto s = limit_sweep(kZero, kZero, 1.0, default_lambda_schedule(), kSamples, 42);
    CHECK(s.extrapolated_limit == 0.0);
    CHECK(s.analytic_target == 0.0);
  }
  SUBCASE("volume budget truncates the schedule") {
    Tolerances tol;
    tol.volume_budget = 50.0;
    const auto s = limit_sweep(ind(0, 1), ind(4, 5), 1.0, default_lambda_schedule(), 20000, 1, tol);
    CHECK(s.pairs.size() < 11);
    CHECK(s.pairs.size() >= 2);
    CHECK(!s.warnings.empty());
    tol.volume_budget = 1e-6;
    CHECK_THROWS_AS(limit_sweep(ind(0, 1), ind(4, 5), 1.0, default_lambda_schedule(), 20000, 1, tol),
                    PreconditionError);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(limit_sweep(TestFunction::gaussian(1), kZero, 1.0, default_lambda_schedule(), 1000, 1),
                    PreconditionError);
    CHECK_THROWS_AS(limit_sweep(ind(0, 1), kZero, 1.0, {0.1, 1.0}, 1000, 1), UsageError);
    CHECK_THROWS_AS(limit_sweep(ind(0, 1), kZero, 0.5, default_lambda_schedule(), 1000, 1), UsageError);
    CHECK_THROWS_AS(limit_sweep(ind(0, 1), TestFunction::zero(2), 1.0, default_lambda_schedule(), 1000, 1),
                    UsageError);
  }
}

TEST_CASE("envelope bounds arithmetic") {
  auto [lo, hi] = envelope_bounds(4.0, 1, 1.0, 1.0, 0.1);
  CHECK(lo == doctest::Approx(3.2));
  CHECK(hi == doctest::Approx(4.4));
  std::tie(lo, hi) = envelope_bounds(4.0, 1, 1.0, 1.0, 0.01);
  CHECK(lo == doctest::Approx(3.92));
  CHECK(hi == doctest::Approx(4.04));
  // N = 2: kappa = pi, width lambda^p pi^2 R^4
  std::tie(lo, hi) = envelope_bounds(1.0, 2, 2.0, 2.0, 0.5);
  CHECK(hi - 1.0 == doctest::Approx(0.25 * std::numbers::pi * std::numbers::pi * 16.0));
  CHECK(1.0 - lo == doctest::Approx(2.0 * (hi - 1.0)));
}

TEST_CASE("envelope check") {
  const auto r = envelope_check(ind(-1, 1), kZero, 1.0, 1.0, {0.1, 0.01}, kSamples, 42);
  CHECK(all_pass(r.report));
  REQUIRE(find(r.report, "grid envelope") != nullptr);
  const auto& pts = r.report.results["points"];
  REQUIRE(pts.size() == 2);
  CHECK(to_double(r.report.results["target"]) == doctest::Approx(4.0));

  const auto z = envelope_check(kZero, kZero, 1.0, 1.0, {0.1, 0.01}, kSamples, 42);
  CHECK(all_pass(z.report));

  CHECK_THROWS_AS(envelope_check(ind(0, 1), ind(4, 5), 1.0, 2.0, {0.1}, 1000, 1), PreconditionError);
  CHECK_THROWS_AS(envelope_check(TestFunction::gaussian(1), kZero, 1.0, 10.0, {0.1}, 1000, 1), PreconditionError);
}

TEST_CASE("Gu-Yung reduction") {
  const auto a = gy_reduction(ind(0, 1), 1.0, default_lambda_schedule(), 1000000, 42);
  CHECK(all_pass(a.report));
  CHECK(to_double(a.report.results["extrapolated_limit"]) == doctest::Approx(4.0).epsilon(0.02));
  const auto b = gy_reduction(ind(0, 1, 2.0), 1.0, default_lambda_schedule(), 1000000, 42);
  CHECK(all_pass(b.report));
  CHECK(to_double(b.report.results["extrapolated_limit"]) == doctest::Approx(8.0).epsilon(0.02));

  const auto z = gy_reduction(kZero, 1.0, default_lambda_schedule(), kSamples, 42);
  CHECK(to_double(z.report.results["extrapolated_limit"]) == 0.0);
}

TEST_CASE("Gu-Yung limits scale like |c|^p") {
  const double p = 2.0;
  const double c = -3.0;
  const auto u = ind(0, 1);
  const auto a = gy_reduction(u, p, default_lambda_schedule(), 500000, 11);
  const auto b = gy_reduction(TestFunction::scaled(c, u), p, default_lambda_schedule(), 500000, 11);
  const double la = to_double(a.report.results["extrapolated_limit"]);
  const double lb = to_double(b.report.results["extrapolated_limit"]);
  const double sa = to_double(a.report.results["extrapolated_std_error"]);
  const double sb = to_double(b.report.results["extrapolated_std_error"]);
  const double ratio = lb / la;
  // first-order propagation of both errors, plus the 2% extrapolation allowance
  const double tol = 3.0 * ratio * std::hypot(sa / la, sb / lb) + 0.02 * std::pow(std::abs(c), p);
  CHECK(std::abs(ratio - std::pow(std::abs(c), p)) <= tol);
}

TEST_CASE("sandwich examples") {
  WeakNormSettings wn;
  const auto same = sandwich_check(ind(0, 1), ind(0, 1), 1.0, kSamples, 42, {}, wn);
  CHECK(all_pass(same.report));
  CHECK(to_double(same.report.results["lower"]) == doctest::Approx(4.0));
  CHECK(to_double(same.report.results["upper_root"]) == doctest::Approx(4.0));
  CHECK(to_double(same.report.results["W"]["value_p_power"]) == doctest::Approx(4.0).epsilon(0.02));

  const auto heart = sandwich_check(ind(0, 1), kZero, 1.0, kSamples, 42, {}, wn);
  CHECK(all_pass(heart.report));
  CHECK(to_double(heart.report.results["W"]["value_p_power"]) == doctest::Approx(2.0).epsilon(1e-9));

  const auto zero = sandwich_check(kZero, kZero, 1.0, kSamples, 42, {}, wn);
  CHECK(all_pass(zero.report));
  CHECK(to_double(zero.report.results["W"]["value_p_power"]) == 0.0);
}

TEST_CASE("corollary forms") {
  const auto r = corollary_forms(ind(0, 1), 1.0, kSamples, 42);
  CHECK(all_pass(r.report));
  CHECK(to_double(r.report.results["lower"]) == doctest::Approx(4.0));
  CHECK(to_double(r.report.results["upper"]) == doctest::Approx(4.0));

  const auto z = corollary_forms(kZero, 1.0, kSamples, 42);
  CHECK(to_double(z.report.results["minus_form"]["value_p_power"]) == 0.0);
  CHECK(to_double(z.report.results["plus_form"]["value_p_power"]) == 0.0);

  // |chi_[0,1] - chi_[-1,0)| = chi_[-1,1]: same sampling region, same seed, same bits.
  const auto sign_changing = TestFunction::sum(ind(0, 1), ind(-1, 0, -1.0));
  const auto a = corollary_forms(sign_changing, 2.0, 50000, 9);
  const auto b = corollary_forms(ind(-1, 1), 2.0, 50000, 9);
  CHECK(a.report.results["minus_form"] == b.report.results["minus_form"]);
  CHECK(a.report.results["plus_form"] == b.report.results["plus_form"]);
  CHECK(a.rows == b.rows);

  CHECK_THROWS_AS(corollary_forms(TestFunction::gaussian(1), 1.0, 1000, 1), PreconditionError);
}

TEST_CASE("truncation study") {
  const double target = 2.0 * std::sqrt(std::numbers::pi / 2.0);
  const auto g = truncation_study(TestFunction::gaussian(1), kZero, 2.0, {2.0, 3.0, 4.0}, 1000000, 42);
  REQUIRE(find(g.report, "converged at R") != nullptr);
  CHECK(find(g.report, "converged at R")->pass);
  for (const auto& v : g.report.verdicts)
    if (v.name.rfind("tail quadrature", 0) == 0) CHECK(v.pass);
  // With sigma = sqrt(T)/(1+sqrt(T)) and one nonzero tail the correction term
  // is T^(1-p/2) (1+sqrt(T))^p, which tends to 1 at p = 2 rather than to 0.
  const Verdict* tail = find(g.report, "tail correction term");
  REQUIRE(tail != nullptr);
  CHECK_FALSE(tail->pass);
  CHECK(tail->measured == doctest::Approx(1.0).epsilon(1e-6));
  const auto& pts = g.report.results["points"];
  REQUIRE(pts.size() == 3);
  CHECK(to_double(pts[2]["lambda_p_measure"]) == doctest::Approx(target).epsilon(0.03));
  CHECK(g.report.results["tail_term_nonincreasing"].get<bool>());

  const auto box = truncation_study(ind(-1, 1), kZero, 1.0, {1.0, 2.0, 3.0}, kSamples, 42);
  CHECK(all_pass(box.report));
  for (const auto& pt : box.report.results["points"])
    CHECK(to_double(pt["lambda_p_measure"]) == doctest::Approx(4.0).epsilon(0.01));

  const auto z = truncation_study(kZero, kZero, 1.0, {1.0, 2.0}, kSamples, 42);
  for (const auto& pt : z.report.results["points"]) CHECK(to_double(pt["lambda_p_measure"]) == 0.0);

  CHECK_THROWS_AS(truncation_study(ind(0, 1), kZero, 1.0, {3.0, 2.0}, 1000, 1), UsageError);
  CHECK_THROWS_AS(truncation_study(ind(0, 1), kZero, 1.0, {2.0, 2.0}, 1000, 1), UsageError);
}

TEST_CASE("tail correction term") {
  CHECK(tail_correction_term(0.0, 0.0, 2.0) == 0.0);
  // T = 1: sigma = 1/2, term = (1 + 0)^p / (1/2)^p
  CHECK(tail_correction_term(1.0, 0.0, 2.0) == doctest::Approx(4.0));
  // decreasing tails give decreasing terms
  CHECK(tail_correction_term(1e-6, 0.0, 2.0) < tail_correction_term(1e-4, 0.0, 2.0));
  const auto rule = default_lambda_rule(1, 2.0);
  CHECK(rule(2.0) == doctest::Approx(0.25));
  const auto q = tail_norm_by_quadrature(TestFunction::gaussian(1), 2.0, 2.0, 1e-12);
  REQUIRE(q.has_value());
  // int_{|x|>2} e^{-2x^2} dx = sqrt(pi/2) erfc(2 sqrt 2)
  CHECK(*q == doctest::Approx(std::sqrt(std::numbers::pi / 2.0) * std::erfc(2.0 * std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("single-quantity reports") {
  const auto m = measure_report(kZero, kZero, 1.0, 1.0, "auto", 1000, 1, 1e-3, 1e-8);
  CHECK(to_double(m.report.results["measure"]) == 0.0);
  const auto e = measure_report(ind(-1, 1), kZero, 1.0, 1.0, "exact", 1000, 1, 1e-3, 1e-8);
  CHECK(to_double(e.report.results["lambda_p_measure"]) == doctest::Approx(4.0).epsilon(1e-12));
  const auto g = measure_report(ind(-1, 1), kZero, 1.0, 1.0, "grid", 1000, 1, 1e-3, 1e-8);
  CHECK(to_double(g.report.results["lambda_p_measure"]) == doctest::Approx(4.0).epsilon(0.01));
  CHECK_THROWS_AS(measure_report(ind(0, 1), kZero, 1.0, 1.0, "magic", 1000, 1, 1e-3, 1e-8), UsageError);

  const auto w = weaknorm_report(ind(0, 1), ind(0, 1), 1.0, kSamples, 42);
  CHECK(all_pass(w.report));

  const auto gg = gagliardo_report(ind(0, 1), 0.5, 1.0, 1e-10);
  CHECK(to_double(gg.report.results["value"]) == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(gg.report.verdicts.empty());
  CHECK(gagliardo_report(ind(0, 1), 0.6, 2.0, 1e-8).report.results["infinite"].get<bool>());
}

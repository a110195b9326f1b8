#pragma once

// Closed catalog of test functions u: R^N -> R with exactly known L^p norms,
// sup-norms and supports.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace levelset {

inline constexpr int kMaxDimension = 8;

enum class FunctionKind {
  BallIndicator,
  RadialStep,
  Gaussian,
  TruncatedPower,
  WeakLpWitness,
  Shifted,
  Scaled,
  AbsValue,
  Negated,
  Zero,
  Truncated,
  Sum,
};

std::string_view to_string(FunctionKind kind);

/// Closed ball {x : |x - center| <= radius}; radius may be +infinity.
struct SupportBall {
  std::vector<double> center;
  double radius = 0.0;
};

struct NormTable {
  double p = 1.0;
  double lp_norm_p_power = 0.0;  ///< ||u||_p^p, possibly +infinity
  double sup_norm = 0.0;         ///< possibly +infinity
};

/// Radial structure of a function about `center`: f(x) depends on |x - center| only.
struct RadialView {
  std::vector<double> center;
  bool any_center = false;        ///< true for the zero function
  std::vector<double> jumps;      ///< radii where the profile is discontinuous
  double support = 0.0;           ///< profile vanishes beyond this radius (may be inf)
  double singular_exponent = 0.0; ///< profile ~ r^{-alpha} at r -> 0 when > 0
};

/// Immutable, cheaply copyable handle to a catalog function. Safe to share
/// across threads.
class TestFunction {
 public:
  static TestFunction zero(int n);
  static TestFunction ball(int n, double amplitude, double radius);
  /// Piecewise-constant radial profile: amplitudes[i] on radii[i-1] < |x| <= radii[i].
  static TestFunction radial_step(int n, std::vector<double> radii, std::vector<double> amplitudes);
  /// amplitude * exp(-|x|^2)
  static TestFunction gaussian(int n, double amplitude = 1.0);
  /// amplitude * |x|^{-alpha} on the closed ball of the given radius.
  static TestFunction truncated_power(int n, double alpha, double radius, double amplitude = 1.0);
  /// amplitude * |x|^{-n/p}: weak-L^p but not L^p.
  static TestFunction weak_lp_witness(int n, double p, double amplitude = 1.0);
  /// x -> inner(x - by)
  static TestFunction shifted(std::vector<double> by, TestFunction inner);
  /// x -> factor * inner(x / dilation)
  static TestFunction scaled(double factor, TestFunction inner, double dilation = 1.0);
  static TestFunction abs_value(TestFunction inner);
  static TestFunction negated(TestFunction inner);
  /// x -> inner(x) on |x| <= radius, 0 outside.
  static TestFunction truncated(double radius, TestFunction inner);
  /// x -> first(x) + second(x). Norms are closed-form only when one term
  /// vanishes or the supports are disjoint (UnsupportedError otherwise);
  /// sup_norm is the triangle bound for overlapping supports.
  static TestFunction sum(TestFunction first, TestFunction second);

  FunctionKind kind() const;
  int dimension() const;

  /// Value at x; throws UsageError when x.size() != dimension().
  double operator()(std::span<const double> x) const;
  /// Same as operator() without the dimension check; x must hold dimension() values.
  double eval(const double* x) const;

  double lp_norm_p_power(double p) const;
  /// Integral of |f|^p over the closed ball B_R centered at the origin.
  double truncated_lp_norm_p_power(double radius, double p) const;
  /// Integral of |f|^p outside B_R.
  double tail_lp_norm_p_power(double radius, double p) const;
  double support_radius() const;
  SupportBall support_ball() const;
  double sup_norm() const;
  NormTable norms(double p) const;

  /// Radial description, or nullopt when the function is not radial about any point.
  std::optional<RadialView> radial() const;

  /// Canonical spec string; parse_function(to_spec()) rebuilds an identical function.
  std::string to_spec() const;

  /// The wrapped function for Shifted/Scaled/AbsValue/Negated/Truncated, the first term of Sum.
  const TestFunction& inner() const;
  const TestFunction& second() const;

  struct Node;

 private:
  explicit TestFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  double truncated_sup(double radius) const;
  std::shared_ptr<const Node> node_;
};

/// Parses a spec string such as "ball a=1 r=1 n=1" or "abs(shift(by=0.5 ball r=0.5))".
/// Throws ParseError with the offending position and the expected tokens.
TestFunction parse_function(std::string_view spec);

/// Value of a radial function at distance r from its center.
double radial_profile(const TestFunction& f, const RadialView& view, double r);

}  // namespace levelset

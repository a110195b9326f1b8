#include "levelset/functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "levelset/errors.hpp"
#include "levelset/special.hpp"

namespace levelset {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

struct TestFunction::Node {
  FunctionKind kind = FunctionKind::Zero;
  int dim = 1;
  double amplitude = 1.0;
  double radius = 1.0;
  double alpha = 0.0;       // TruncatedPower exponent, WeakLpWitness: n / p0
  double witness_p = 1.0;   // WeakLpWitness reference exponent
  double factor = 1.0;      // Scaled
  double dilation = 1.0;    // Scaled
  std::vector<double> radii;
  std::vector<double> amplitudes;
  std::vector<double> shift;
  std::shared_ptr<const TestFunction> inner;
  std::shared_ptr<const TestFunction> second;  // Sum
};

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::BallIndicator: return "BallIndicator";
    case FunctionKind::RadialStep: return "RadialStep";
    case FunctionKind::Gaussian: return "Gaussian";
    case FunctionKind::TruncatedPower: return "TruncatedPower";
    case FunctionKind::WeakLpWitness: return "WeakLpWitness";
    case FunctionKind::Shifted: return "Shifted";
    case FunctionKind::Scaled: return "Scaled";
    case FunctionKind::AbsValue: return "AbsValue";
    case FunctionKind::Negated: return "Negated";
    case FunctionKind::Zero: return "Zero";
    case FunctionKind::Truncated: return "Truncated";
    case FunctionKind::Sum: return "Sum";
  }
  return "?";
}

namespace {

void check_dimension(int n) {
  if (n < 1 || n > kMaxDimension)
    throw UsageError("dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " +
                     std::to_string(n));
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw UsageError(std::string(what) + " must be finite");
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("p must be a finite real >= 1");
}

double norm2(const double* x, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double vec_norm(const std::vector<double>& v) { return std::sqrt(norm2(v.data(), static_cast<int>(v.size()))); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += num(v[i]);
  }
  return s;
}

// Integral over the ball of radius R of |x|^{-gamma}: n kappa_n R^{n-gamma} / (n-gamma).
double power_ball_integral(int n, double gamma, double radius) {
  if (radius <= 0.0) return 0.0;
  const double beta = n - gamma;
  if (beta <= 0.0) return kInf;
  return unit_sphere_area(n) * std::pow(radius, beta) / beta;
}

// Integral over lo < |x| <= hi of |x|^{-gamma}.
double power_shell_integral(int n, double gamma, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const double beta = n - gamma;
  if (lo <= 0.0) return power_ball_integral(n, gamma, hi);
  if (!std::isfinite(hi)) {
    if (beta >= 0.0) return kInf;
    return unit_sphere_area(n) * std::pow(lo, beta) / (-beta);
  }
  if (beta == 0.0) return unit_sphere_area(n) * std::log(hi / lo);
  return unit_sphere_area(n) * (std::pow(hi, beta) - std::pow(lo, beta)) / beta;
}

double abs_pow(double a, double p) { return std::pow(std::abs(a), p); }

}  // namespace

// ---------------------------------------------------------------------------
// construction

TestFunction TestFunction::zero(int n) {
  check_dimension(n);
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Zero;
  node->dim = n;
  return TestFunction(node);
}

TestFunction TestFunction::ball(int n, double amplitude, double radius) {
  check_dimension(n);
  check_finite(amplitude, "ball amplitude");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("ball radius must be positive and finite");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::BallIndicator;
  node->dim = n;
  node->amplitude = amplitude;
  node->radius = radius;
  return TestFunction(node);
}

TestFunction TestFunction::radial_step(int n, std::vector<double> radii, std::vector<double> amplitudes) {
  check_dimension(n);
  if (radii.empty() || radii.size() != amplitudes.size())
    throw UsageError("radial step needs equally many radii and amplitudes (at least one)");
  double prev = 0.0;
  for (double r : radii) {
    if (!(r > prev) || !std::isfinite(r)) throw UsageError("radial step radii must be positive, finite, increasing");
    prev = r;
  }
  for (double a : amplitudes) check_finite(a, "radial step amplitude");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::RadialStep;
  node->dim = n;
  node->radii = std::move(radii);
  node->amplitudes = std::move(amplitudes);
  return TestFunction(node);
}

TestFunction TestFunction::gaussian(int n, double amplitude) {
  check_dimension(n);
  check_finite(amplitude, "gaussian amplitude");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Gaussian;
  node->dim = n;
  node->amplitude = amplitude;
  return TestFunction(node);
}

TestFunction TestFunction::truncated_power(int n, double alpha, double radius, double amplitude) {
  check_dimension(n);
  check_finite(alpha, "power exponent");
  check_finite(amplitude, "power amplitude");
  if (alpha < 0.0) throw UsageError("power exponent alpha must be >= 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("power radius must be positive and finite");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::TruncatedPower;
  node->dim = n;
  node->alpha = alpha;
  node->radius = radius;
  node->amplitude = amplitude;
  return TestFunction(node);
}

TestFunction TestFunction::weak_lp_witness(int n, double p, double amplitude) {
  check_dimension(n);
  check_p(p);
  check_finite(amplitude, "witness amplitude");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::WeakLpWitness;
  node->dim = n;
  node->witness_p = p;
  node->alpha = n / p;
  node->amplitude = amplitude;
  return TestFunction(node);
}

TestFunction TestFunction::shifted(std::vector<double> by, TestFunction inner) {
  if (static_cast<int>(by.size()) != inner.dimension())
    throw UsageError("shift vector has " + std::to_string(by.size()) + " components, function dimension is " +
                     std::to_string(inner.dimension()));
  for (double b : by) check_finite(b, "shift component");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Shifted;
  node->dim = inner.dimension();
  node->shift = std::move(by);
  node->inner = std::make_shared<const TestFunction>(std::move(inner));
  return TestFunction(node);
}

TestFunction TestFunction::scaled(double factor, TestFunction inner, double dilation) {
  check_finite(factor, "scale factor");
  if (!(dilation > 0.0) || !std::isfinite(dilation)) throw UsageError("dilation must be positive and finite");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Scaled;
  node->dim = inner.dimension();
  node->factor = factor;
  node->dilation = dilation;
  node->inner = std::make_shared<const TestFunction>(std::move(inner));
  return TestFunction(node);
}

TestFunction TestFunction::abs_value(TestFunction inner) {
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::AbsValue;
  node->dim = inner.dimension();
  node->inner = std::make_shared<const TestFunction>(std::move(inner));
  return TestFunction(node);
}

TestFunction TestFunction::negated(TestFunction inner) {
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Negated;
  node->dim = inner.dimension();
  node->inner = std::make_shared<const TestFunction>(std::move(inner));
  return TestFunction(node);
}

TestFunction TestFunction::truncated(double radius, TestFunction inner) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("truncation radius must be positive and finite");
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Truncated;
  node->dim = inner.dimension();
  node->radius = radius;
  node->inner = std::make_shared<const TestFunction>(std::move(inner));
  return TestFunction(node);
}

TestFunction TestFunction::sum(TestFunction first, TestFunction second) {
  if (first.dimension() != second.dimension())
    throw UsageError("sum of functions of dimension " + std::to_string(first.dimension()) + " and " +
                     std::to_string(second.dimension()));
  auto node = std::make_shared<Node>();
  node->kind = FunctionKind::Sum;
  node->dim = first.dimension();
  node->inner = std::make_shared<const TestFunction>(std::move(first));
  node->second = std::make_shared<const TestFunction>(std::move(second));
  return TestFunction(node);
}

FunctionKind TestFunction::kind() const { return node_->kind; }
int TestFunction::dimension() const { return node_->dim; }

const TestFunction& TestFunction::inner() const {
  if (!node_->inner) throw UsageError(std::string(to_string(node_->kind)) + " has no inner function");
  return *node_->inner;
}

const TestFunction& TestFunction::second() const {
  if (!node_->second) throw UsageError(std::string(to_string(node_->kind)) + " has no second term");
  return *node_->second;
}

namespace {

bool identically_zero(const TestFunction& f) { return f.support_ball().radius == 0.0 || f.sup_norm() == 0.0; }

bool disjoint_supports(const SupportBall& a, const SupportBall& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.center.size(); ++i) d2 += (a.center[i] - b.center[i]) * (a.center[i] - b.center[i]);
  return std::sqrt(d2) >= a.radius + b.radius;
}

}  // namespace

// Norms of a sum are closed-form only when one term vanishes or the supports
// are disjoint; `combine` adds the two terms' values in that case.
template <class F>
static double sum_norm(const TestFunction& a, const TestFunction& b, F&& term) {
  if (identically_zero(b)) return term(a);
  if (identically_zero(a)) return term(b);
  if (disjoint_supports(a.support_ball(), b.support_ball())) return term(a) + term(b);
  throw UnsupportedError("no closed-form norm for a sum of functions with overlapping supports");
}

// ---------------------------------------------------------------------------
// evaluation

double TestFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != node_->dim)
    throw UsageError("point has dimension " + std::to_string(x.size()) + ", function expects " +
                     std::to_string(node_->dim));
  return eval(x.data());
}

double TestFunction::eval(const double* x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case FunctionKind::Zero:
      return 0.0;
    case FunctionKind::BallIndicator:
      return norm2(x, n.dim) <= n.radius * n.radius ? n.amplitude : 0.0;
    case FunctionKind::RadialStep: {
      const double r = std::sqrt(norm2(x, n.dim));
      for (std::size_t i = 0; i < n.radii.size(); ++i)
        if (r <= n.radii[i]) return n.amplitudes[i];
      return 0.0;
    }
    case FunctionKind::Gaussian:
      return n.amplitude * std::exp(-norm2(x, n.dim));
    case FunctionKind::TruncatedPower: {
      const double r2 = norm2(x, n.dim);
      if (r2 > n.radius * n.radius || n.amplitude == 0.0) return 0.0;
      if (n.alpha == 0.0) return n.amplitude;
      if (r2 == 0.0) return std::copysign(kInf, n.amplitude);
      return n.amplitude * std::pow(r2, -0.5 * n.alpha);
    }
    case FunctionKind::WeakLpWitness: {
      if (n.amplitude == 0.0) return 0.0;
      const double r2 = norm2(x, n.dim);
      if (r2 == 0.0) return std::copysign(kInf, n.amplitude);
      return n.amplitude * std::pow(r2, -0.5 * n.alpha);
    }
    case FunctionKind::Shifted: {
      std::array<double, kMaxDimension> y{};
      for (int i = 0; i < n.dim; ++i) y[i] = x[i] - n.shift[i];
      return n.inner->eval(y.data());
    }
    case FunctionKind::Scaled: {
      if (n.factor == 0.0) return 0.0;
      if (n.dilation == 1.0) return n.factor * n.inner->eval(x);
      std::array<double, kMaxDimension> y{};
      for (int i = 0; i < n.dim; ++i) y[i] = x[i] / n.dilation;
      return n.factor * n.inner->eval(y.data());
    }
    case FunctionKind::AbsValue:
      return std::abs(n.inner->eval(x));
    case FunctionKind::Negated:
      return -n.inner->eval(x);
    case FunctionKind::Truncated:
      return norm2(x, n.dim) <= n.radius * n.radius ? n.inner->eval(x) : 0.0;
    case FunctionKind::Sum:
      return n.inner->eval(x) + n.second->eval(x);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// norms

double TestFunction::lp_norm_p_power(double p) const {
  check_p(p);
  const Node& n = *node_;
  const double kappa = unit_ball_volume(n.dim);
  switch (n.kind) {
    case FunctionKind::Zero:
      return 0.0;
    case FunctionKind::BallIndicator:
      return abs_pow(n.amplitude, p) * kappa * std::pow(n.radius, n.dim);
    case FunctionKind::RadialStep: {
      double s = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < n.radii.size(); ++i) {
        s += abs_pow(n.amplitudes[i], p) * kappa * (std::pow(n.radii[i], n.dim) - std::pow(prev, n.dim));
        prev = n.radii[i];
      }
      return s;
    }
    case FunctionKind::Gaussian:
      return abs_pow(n.amplitude, p) * std::pow(std::numbers::pi / p, 0.5 * n.dim);
    case FunctionKind::TruncatedPower:
      if (n.amplitude == 0.0) return 0.0;
      return abs_pow(n.amplitude, p) * power_ball_integral(n.dim, n.alpha * p, n.radius);
    case FunctionKind::WeakLpWitness:
      return n.amplitude == 0.0 ? 0.0 : kInf;
    case FunctionKind::Shifted:
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->lp_norm_p_power(p);
    case FunctionKind::Scaled:
      if (n.factor == 0.0) return 0.0;
      return abs_pow(n.factor, p) * std::pow(n.dilation, n.dim) * n.inner->lp_norm_p_power(p);
    case FunctionKind::Truncated:
      return n.inner->truncated_lp_norm_p_power(n.radius, p);
    case FunctionKind::Sum:
      return sum_norm(*n.inner, *n.second, [p](const TestFunction& f) { return f.lp_norm_p_power(p); });
  }
  return 0.0;
}

double TestFunction::truncated_lp_norm_p_power(double R, double p) const {
  check_p(p);
  if (!(R >= 0.0)) throw UsageError("truncation radius must be >= 0");
  if (R == 0.0) return 0.0;
  if (!std::isfinite(R)) return lp_norm_p_power(p);
  const Node& n = *node_;
  const double kappa = unit_ball_volume(n.dim);
  switch (n.kind) {
    case FunctionKind::Zero:
      return 0.0;
    case FunctionKind::BallIndicator:
      return abs_pow(n.amplitude, p) * kappa * std::pow(std::min(n.radius, R), n.dim);
    case FunctionKind::RadialStep: {
      double s = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < n.radii.size() && prev < R; ++i) {
        const double hi = std::min(n.radii[i], R);
        s += abs_pow(n.amplitudes[i], p) * kappa * (std::pow(hi, n.dim) - std::pow(prev, n.dim));
        prev = n.radii[i];
      }
      return s;
    }
    case FunctionKind::Gaussian:
      return abs_pow(n.amplitude, p) * std::pow(std::numbers::pi / p, 0.5 * n.dim) *
             gamma_p_half(0.5 * n.dim, p * R * R);
    case FunctionKind::TruncatedPower:
      if (n.amplitude == 0.0) return 0.0;
      return abs_pow(n.amplitude, p) * power_ball_integral(n.dim, n.alpha * p, std::min(n.radius, R));
    case FunctionKind::WeakLpWitness:
      if (n.amplitude == 0.0) return 0.0;
      return abs_pow(n.amplitude, p) * power_ball_integral(n.dim, n.alpha * p, R);
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->truncated_lp_norm_p_power(R, p);
    case FunctionKind::Scaled:
      if (n.factor == 0.0) return 0.0;
      return abs_pow(n.factor, p) * std::pow(n.dilation, n.dim) *
             n.inner->truncated_lp_norm_p_power(R / n.dilation, p);
    case FunctionKind::Truncated:
      return n.inner->truncated_lp_norm_p_power(std::min(R, n.radius), p);
    case FunctionKind::Sum:
      return sum_norm(*n.inner, *n.second, [R, p](const TestFunction& f) { return f.truncated_lp_norm_p_power(R, p); });
    case FunctionKind::Shifted: {
      const auto ball = support_ball();
      const double c = vec_norm(ball.center);
      if (c + ball.radius <= R) return lp_norm_p_power(p);
      if (c - ball.radius >= R) return 0.0;
      throw UnsupportedError("truncation of a shifted function whose support straddles the sphere |x| = R");
    }
  }
  return 0.0;
}

double TestFunction::tail_lp_norm_p_power(double R, double p) const {
  check_p(p);
  if (!(R >= 0.0)) throw UsageError("truncation radius must be >= 0");
  if (R == 0.0) return lp_norm_p_power(p);
  if (!std::isfinite(R)) return 0.0;
  const Node& n = *node_;
  const double kappa = unit_ball_volume(n.dim);
  switch (n.kind) {
    case FunctionKind::Zero:
      return 0.0;
    case FunctionKind::BallIndicator:
      if (R >= n.radius) return 0.0;
      return abs_pow(n.amplitude, p) * kappa * (std::pow(n.radius, n.dim) - std::pow(R, n.dim));
    case FunctionKind::RadialStep: {
      double s = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < n.radii.size(); ++i) {
        const double lo = std::max(prev, R);
        if (n.radii[i] > lo)
          s += abs_pow(n.amplitudes[i], p) * kappa * (std::pow(n.radii[i], n.dim) - std::pow(lo, n.dim));
        prev = n.radii[i];
      }
      return s;
    }
    case FunctionKind::Gaussian:
      return abs_pow(n.amplitude, p) * std::pow(std::numbers::pi / p, 0.5 * n.dim) *
             gamma_q_half(0.5 * n.dim, p * R * R);
    case FunctionKind::TruncatedPower:
      if (n.amplitude == 0.0 || R >= n.radius) return 0.0;
      return abs_pow(n.amplitude, p) * power_shell_integral(n.dim, n.alpha * p, R, n.radius);
    case FunctionKind::WeakLpWitness:
      if (n.amplitude == 0.0) return 0.0;
      return abs_pow(n.amplitude, p) * power_shell_integral(n.dim, n.alpha * p, R, kInf);
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->tail_lp_norm_p_power(R, p);
    case FunctionKind::Scaled:
      if (n.factor == 0.0) return 0.0;
      return abs_pow(n.factor, p) * std::pow(n.dilation, n.dim) *
             n.inner->tail_lp_norm_p_power(R / n.dilation, p);
    case FunctionKind::Truncated:
      if (R >= n.radius) return 0.0;
      return n.inner->tail_lp_norm_p_power(R, p) - n.inner->tail_lp_norm_p_power(n.radius, p);
    case FunctionKind::Sum:
      return sum_norm(*n.inner, *n.second, [R, p](const TestFunction& f) { return f.tail_lp_norm_p_power(R, p); });
    case FunctionKind::Shifted: {
      const auto ball = support_ball();
      const double c = vec_norm(ball.center);
      if (c + ball.radius <= R) return 0.0;
      if (c - ball.radius >= R) return lp_norm_p_power(p);
      throw UnsupportedError("tail of a shifted function whose support straddles the sphere |x| = R");
    }
  }
  return 0.0;
}

SupportBall TestFunction::support_ball() const {
  const Node& n = *node_;
  SupportBall b{std::vector<double>(n.dim, 0.0), 0.0};
  switch (n.kind) {
    case FunctionKind::Zero:
      return b;
    case FunctionKind::BallIndicator:
    case FunctionKind::TruncatedPower:
      b.radius = n.amplitude == 0.0 ? 0.0 : n.radius;
      return b;
    case FunctionKind::RadialStep:
      for (std::size_t i = 0; i < n.radii.size(); ++i)
        if (n.amplitudes[i] != 0.0) b.radius = n.radii[i];
      return b;
    case FunctionKind::Gaussian:
    case FunctionKind::WeakLpWitness:
      b.radius = n.amplitude == 0.0 ? 0.0 : kInf;
      return b;
    case FunctionKind::Shifted: {
      b = n.inner->support_ball();
      for (int i = 0; i < n.dim; ++i) b.center[i] += n.shift[i];
      return b;
    }
    case FunctionKind::Scaled: {
      if (n.factor == 0.0) return b;
      b = n.inner->support_ball();
      for (double& c : b.center) c *= n.dilation;
      b.radius *= n.dilation;
      return b;
    }
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->support_ball();
    case FunctionKind::Truncated: {
      auto inner = n.inner->support_ball();
      if (inner.radius == 0.0) return inner;
      if (vec_norm(inner.center) - inner.radius >= n.radius) return b;  // disjoint: identically zero
      if (inner.radius <= n.radius) return inner;
      b.radius = n.radius;
      return b;
    }
    case FunctionKind::Sum: {
      const auto a = n.inner->support_ball();
      const auto c = n.second->support_ball();
      if (a.radius == 0.0) return c;
      if (c.radius == 0.0) return a;
      if (!std::isfinite(a.radius) || !std::isfinite(c.radius)) {
        b.radius = kInf;
        return b;
      }
      // Smallest ball containing both balls.
      double d2 = 0.0;
      for (int i = 0; i < n.dim; ++i) d2 += (c.center[i] - a.center[i]) * (c.center[i] - a.center[i]);
      const double d = std::sqrt(d2);
      if (d + c.radius <= a.radius) return a;
      if (d + a.radius <= c.radius) return c;
      b.radius = 0.5 * (d + a.radius + c.radius);
      const double t = (b.radius - a.radius) / d;
      for (int i = 0; i < n.dim; ++i) b.center[i] = a.center[i] + t * (c.center[i] - a.center[i]);
      return b;
    }
  }
  return b;
}

double TestFunction::support_radius() const {
  const Node& n = *node_;
  if (n.kind == FunctionKind::Truncated) {
    const auto inner = n.inner->support_ball();
    if (inner.radius == 0.0) return 0.0;
    const double c = vec_norm(inner.center);
    if (c - inner.radius >= n.radius) return 0.0;
    return std::min(n.radius, c + inner.radius);
  }
  const auto b = support_ball();
  if (b.radius == 0.0) return 0.0;
  return vec_norm(b.center) + b.radius;
}

double TestFunction::sup_norm() const {
  const Node& n = *node_;
  switch (n.kind) {
    case FunctionKind::Zero:
      return 0.0;
    case FunctionKind::BallIndicator:
    case FunctionKind::Gaussian:
      return std::abs(n.amplitude);
    case FunctionKind::RadialStep: {
      double m = 0.0;
      for (double a : n.amplitudes) m = std::max(m, std::abs(a));
      return m;
    }
    case FunctionKind::TruncatedPower:
      if (n.amplitude == 0.0) return 0.0;
      return n.alpha > 0.0 ? kInf : std::abs(n.amplitude);
    case FunctionKind::WeakLpWitness:
      return n.amplitude == 0.0 ? 0.0 : kInf;
    case FunctionKind::Shifted:
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->sup_norm();
    case FunctionKind::Scaled:
      return n.factor == 0.0 ? 0.0 : std::abs(n.factor) * n.inner->sup_norm();
    case FunctionKind::Truncated:
      return n.inner->truncated_sup(n.radius);
    case FunctionKind::Sum: {
      // Exact for disjoint supports, otherwise the triangle-inequality bound.
      const double a = n.inner->sup_norm();
      const double b = n.second->sup_norm();
      if (identically_zero(*n.inner) || identically_zero(*n.second) ||
          disjoint_supports(n.inner->support_ball(), n.second->support_ball()))
        return std::max(a, b);
      return a + b;
    }
  }
  return 0.0;
}

// Supremum of |f| over the closed ball B_R (exact for origin-radial kinds, an
// upper bound for shifted ones).
double TestFunction::truncated_sup(double R) const {
  const Node& n = *node_;
  switch (n.kind) {
    case FunctionKind::RadialStep: {
      double m = 0.0;
      double prev = 0.0;
      for (std::size_t i = 0; i < n.radii.size(); ++i) {
        if (prev <= R) m = std::max(m, std::abs(n.amplitudes[i]));
        prev = n.radii[i];
      }
      return m;
    }
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->truncated_sup(R);
    case FunctionKind::Scaled:
      return n.factor == 0.0 ? 0.0 : std::abs(n.factor) * n.inner->truncated_sup(R / n.dilation);
    case FunctionKind::Truncated:
      return n.inner->truncated_sup(std::min(R, n.radius));
    case FunctionKind::Shifted: {
      const auto b = support_ball();
      if (vec_norm(b.center) - b.radius >= R) return 0.0;
      return sup_norm();
    }
    default:
      return sup_norm();
  }
}

NormTable TestFunction::norms(double p) const { return {p, lp_norm_p_power(p), sup_norm()}; }

// ---------------------------------------------------------------------------
// radial structure

std::optional<RadialView> TestFunction::radial() const {
  const Node& n = *node_;
  RadialView v;
  v.center.assign(n.dim, 0.0);
  switch (n.kind) {
    case FunctionKind::Zero:
      v.any_center = true;
      return v;
    case FunctionKind::BallIndicator:
      v.jumps = {n.radius};
      v.support = n.amplitude == 0.0 ? 0.0 : n.radius;
      return v;
    case FunctionKind::RadialStep:
      v.jumps = n.radii;
      v.support = support_ball().radius;
      return v;
    case FunctionKind::Gaussian:
      v.support = n.amplitude == 0.0 ? 0.0 : kInf;
      return v;
    case FunctionKind::TruncatedPower:
      v.jumps = {n.radius};
      v.support = n.amplitude == 0.0 ? 0.0 : n.radius;
      v.singular_exponent = n.amplitude == 0.0 ? 0.0 : n.alpha;
      return v;
    case FunctionKind::WeakLpWitness:
      v.support = n.amplitude == 0.0 ? 0.0 : kInf;
      v.singular_exponent = n.amplitude == 0.0 ? 0.0 : n.alpha;
      return v;
    case FunctionKind::Shifted: {
      auto inner = n.inner->radial();
      if (!inner) return std::nullopt;
      if (!inner->any_center)
        for (int i = 0; i < n.dim; ++i) inner->center[i] += n.shift[i];
      return inner;
    }
    case FunctionKind::Scaled: {
      auto inner = n.inner->radial();
      if (!inner) return std::nullopt;
      if (n.factor == 0.0) {
        RadialView z;
        z.center.assign(n.dim, 0.0);
        z.any_center = true;
        return z;
      }
      for (double& c : inner->center) c *= n.dilation;
      for (double& j : inner->jumps) j *= n.dilation;
      inner->support *= n.dilation;
      return inner;
    }
    case FunctionKind::AbsValue:
    case FunctionKind::Negated:
      return n.inner->radial();
    case FunctionKind::Truncated: {
      auto inner = n.inner->radial();
      if (!inner) return std::nullopt;
      if (inner->any_center) return inner;
      if (vec_norm(inner->center) != 0.0) return std::nullopt;
      std::vector<double> jumps;
      for (double j : inner->jumps)
        if (j < n.radius) jumps.push_back(j);
      jumps.push_back(n.radius);
      inner->jumps = std::move(jumps);
      inner->support = std::min(inner->support, n.radius);
      return inner;
    }
    case FunctionKind::Sum: {
      auto a = n.inner->radial();
      auto b = n.second->radial();
      if (!a || !b) return std::nullopt;
      if (a->any_center) return b;
      if (b->any_center) return a;
      for (int i = 0; i < n.dim; ++i)
        if (a->center[i] != b->center[i]) return std::nullopt;
      a->jumps.insert(a->jumps.end(), b->jumps.begin(), b->jumps.end());
      std::sort(a->jumps.begin(), a->jumps.end());
      a->jumps.erase(std::unique(a->jumps.begin(), a->jumps.end()), a->jumps.end());
      a->support = std::max(a->support, b->support);
      a->singular_exponent = std::max(a->singular_exponent, b->singular_exponent);
      return a;
    }
  }
  return std::nullopt;
}

double radial_profile(const TestFunction& f, const RadialView& view, double r) {
  std::array<double, kMaxDimension> x{};
  const int n = f.dimension();
  for (int i = 0; i < n; ++i) x[i] = view.center[i];
  x[0] += r;
  return f.eval(x.data());
}

// ---------------------------------------------------------------------------
// spec strings

std::string TestFunction::to_spec() const {
  const Node& n = *node_;
  const std::string dim = " n=" + std::to_string(n.dim);
  switch (n.kind) {
    case FunctionKind::Zero:
      return "zero" + dim;
    case FunctionKind::BallIndicator:
      return "ball a=" + num(n.amplitude) + " r=" + num(n.radius) + dim;
    case FunctionKind::RadialStep:
      return "step r=" + num_list(n.radii) + " a=" + num_list(n.amplitudes) + dim;
    case FunctionKind::Gaussian:
      return "gauss a=" + num(n.amplitude) + dim;
    case FunctionKind::TruncatedPower:
      return "power alpha=" + num(n.alpha) + " r=" + num(n.radius) + " a=" + num(n.amplitude) + dim;
    case FunctionKind::WeakLpWitness:
      return "witness p=" + num(n.witness_p) + " a=" + num(n.amplitude) + dim;
    case FunctionKind::Shifted:
      return "shift(by=" + num_list(n.shift) + " " + n.inner->to_spec() + ")";
    case FunctionKind::Scaled:
      return "scale(c=" + num(n.factor) + " d=" + num(n.dilation) + " " + n.inner->to_spec() + ")";
    case FunctionKind::AbsValue:
      return "abs(" + n.inner->to_spec() + ")";
    case FunctionKind::Negated:
      return "neg(" + n.inner->to_spec() + ")";
    case FunctionKind::Truncated:
      return "trunc(r=" + num(n.radius) + " " + n.inner->to_spec() + ")";
    case FunctionKind::Sum:
      return "sum(" + n.inner->to_spec() + " " + n.second->to_spec() + ")";
  }
  return "zero" + dim;
}

}  // namespace levelset

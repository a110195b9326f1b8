// Gagliardo seminorm via the translation-difference representation
//   [u]^p = |S^{N-1}| int_0^inf t^{-1-sp} Phi(t) dt,  Phi(t) = ||u(. + t e1) - u||_p^p,
// valid for N = 1 and for radial u in any dimension.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levelset/errors.hpp"
#include "levelset/quadrature.hpp"
#include "levelset/special.hpp"
#include "levelset/weaknorm.hpp"

namespace levelset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool piecewise_constant(const TestFunction& f) {
  switch (f.kind()) {
    case FunctionKind::Zero:
    case FunctionKind::BallIndicator:
    case FunctionKind::RadialStep:
      return true;
    case FunctionKind::Gaussian:
    case FunctionKind::WeakLpWitness:
      return false;
    case FunctionKind::TruncatedPower:
      return std::isfinite(f.sup_norm());
    case FunctionKind::Sum:
      return piecewise_constant(f.inner()) && piecewise_constant(f.second());
    default:
      return piecewise_constant(f.inner());
  }
}

// Discontinuities of a one-dimensional function, as far as its structure exposes them.
void jump_points_1d(const TestFunction& f, std::vector<double>& out) {
  if (auto view = f.radial(); view && !view->any_center) {
    for (double j : view->jumps) {
      out.push_back(view->center[0] - j);
      out.push_back(view->center[0] + j);
    }
    return;
  }
  if (f.kind() == FunctionKind::Sum) {
    jump_points_1d(f.inner(), out);
    jump_points_1d(f.second(), out);
  } else if (f.kind() == FunctionKind::Negated || f.kind() == FunctionKind::AbsValue) {
    jump_points_1d(f.inner(), out);
  }
}

struct Setup {
  const TestFunction* f = nullptr;
  int n = 1;
  double p = 1.0;
  double lo = 0.0, hi = 0.0;     // N = 1: x-range carrying the support
  RadialView view;               // N = 2
  double radius = 0.0;           // N = 2: effective support radius of the profile
  std::vector<double> jumps;     // N = 1: points; N = 2: radii
  bool piecewise = false;
};

double effective_radius(const TestFunction& f, double p, double budget) {
  const double r = f.support_radius();
  if (std::isfinite(r)) return r;
  for (double R = 1.0; R < 1e6; R *= 1.25)
    if (f.tail_lp_norm_p_power(R, p) <= budget) return R;
  throw UnsupportedError("Gagliardo seminorm: tail of u does not decay");
}

double phi_1d(const Setup& st, double t, double tol) {
  std::vector<double> pts = st.jumps;
  for (double j : st.jumps) pts.push_back(j - t);
  const auto bp = quad::breakpoints(std::move(pts), st.lo - t, st.hi);
  const TestFunction& f = *st.f;
  auto g = [&](double x) {
    const double y = x + t;
    return std::pow(std::abs(f.eval(&y) - f.eval(&x)), st.p);
  };
  return quad::integrate_pieces(g, bp, tol).value;
}

// Integral over the angle of |U(r) - U(|x + t e1|)|^p for |x| = r, N = 2.
double angular_2d(const Setup& st, double r, double t, double tol) {
  const TestFunction& f = *st.f;
  const double ur = radial_profile(f, st.view, r);
  auto rho = [&](double th) { return std::sqrt(std::max(0.0, r * r + t * t + 2.0 * r * t * std::cos(th))); };
  std::vector<double> cuts;
  for (double j : st.jumps) {
    if (j > std::abs(r - t) && j < r + t) cuts.push_back(std::acos(std::clamp((j * j - r * r - t * t) / (2 * r * t), -1.0, 1.0)));
  }
  const auto bp = quad::breakpoints(std::move(cuts), 0.0, std::numbers::pi);
  if (st.piecewise) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double mid = 0.5 * (bp[i] + bp[i + 1]);
      s += (bp[i + 1] - bp[i]) * std::pow(std::abs(ur - radial_profile(f, st.view, rho(mid))), st.p);
    }
    return 2.0 * s;
  }
  auto g = [&](double th) { return std::pow(std::abs(ur - radial_profile(f, st.view, rho(th))), st.p); };
  return 2.0 * quad::integrate_pieces(g, bp, 0.5 * tol).value;
}

double phi_2d(const Setup& st, double t, double tol) {
  const double r_max = st.radius + t;
  std::vector<double> pts = st.jumps;
  for (double j : st.jumps) {
    pts.push_back(j + t);
    pts.push_back(j - t);
    pts.push_back(t - j);
  }
  pts.push_back(t);
  const auto bp = quad::breakpoints(std::move(pts), 0.0, r_max);
  const double inner_tol = tol / (std::numbers::pi * r_max * r_max);
  auto g = [&](double r) { return r > 0.0 ? r * angular_2d(st, r, t, inner_tol) : 0.0; };
  return quad::integrate_pieces(g, bp, 0.5 * tol).value;
}

Setup make_setup(const TestFunction& u, double p, double tol) {
  Setup st;
  st.f = &u;
  st.n = u.dimension();
  st.p = p;
  if (st.n != 1 && st.n != 2) throw UnsupportedError("Gagliardo seminorm supports N = 1 and N = 2");
  if (!std::isfinite(u.sup_norm())) throw UnsupportedError("Gagliardo seminorm: u must be bounded");
  st.piecewise = piecewise_constant(u);
  const double budget = 1e-6 * tol;
  if (st.n == 1) {
    const auto ball = u.support_ball();
    const double r = std::isfinite(ball.radius) ? ball.radius : effective_radius(u, p, budget);
    st.lo = ball.center[0] - r;
    st.hi = ball.center[0] + r;
    jump_points_1d(u, st.jumps);
  } else {
    auto view = u.radial();
    if (!view) throw UnsupportedError("Gagliardo seminorm in N = 2 needs a radial function");
    st.view = *view;
    if (st.view.any_center) st.view.center.assign(2, 0.0);
    st.radius = std::isfinite(st.view.support) ? st.view.support : effective_radius(u, p, budget);
    st.jumps = st.view.jumps;
  }
  std::sort(st.jumps.begin(), st.jumps.end());
  st.jumps.erase(std::unique(st.jumps.begin(), st.jumps.end()), st.jumps.end());
  return st;
}

}  // namespace

double translation_difference_p_power(const TestFunction& u, double t, double p, double tol) {
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  const auto st = make_setup(u, p, tol);
  return st.n == 1 ? phi_1d(st, t, tol) : phi_2d(st, t, tol);
}

GagliardoResult gagliardo_seminorm_p_power(const TestFunction& u, double s, double p, double tol) {
  if (!(tol > 0.0)) throw UsageError("Gagliardo seminorm: tol must be positive");
  if (!(s > 0.0 && s < 1.0)) throw UsageError("Gagliardo seminorm: s must lie in (0, 1)");
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("Gagliardo seminorm: p must be a finite real >= 1");
  GagliardoResult res;
  if (u.sup_norm() == 0.0) return res;
  const auto st = make_setup(u, p, tol);
  const double sp = s * p;
  const double sphere = st.n == 1 ? 2.0 : 2.0 * std::numbers::pi;
  const double diameter = st.n == 1 ? st.hi - st.lo : 2.0 * st.radius;

  // Phi is piecewise smooth with kinks at differences of jump locations.
  std::vector<double> kinks;
  for (double a : st.jumps)
    for (double b : st.jumps) {
      kinks.push_back(std::abs(a - b));
      if (st.n == 2) kinks.push_back(a + b);
    }
  double eps0 = 0.25 * diameter;
  for (double k : kinks)
    if (k > 1e-12 * diameter) eps0 = std::min(eps0, 0.5 * k);

  const double phi_far = st.n == 1 ? phi_1d(st, diameter, 1e-12) : phi_2d(st, diameter, 1e-12);
  const double phi_tol = 1e-12 * std::max(phi_far, 1e-300);
  auto phi = [&](double t) { return st.n == 1 ? phi_1d(st, t, phi_tol) : phi_2d(st, t, phi_tol); };
  auto g = [&](double t) { return std::pow(t, -1.0 - sp) * phi(t); };

  // t >= diameter: the translate no longer overlaps, Phi is constant.
  const double far = phi_far * std::pow(diameter, -sp) / sp;
  const auto bp = quad::breakpoints(kinks, eps0, diameter);
  const auto main = quad::integrate_pieces(g, bp, 0.25 * tol / sphere);
  double total = far + main.value;
  double err = main.error;

  // Near-diagonal bands [eps0 2^{-k-1}, eps0 2^{-k}].
  double prev_band = 0.0;
  double prev_ratio = -1.0;
  double hi = eps0;
  int diverging = 0;
  for (int k = 0; k < 200; ++k) {
    const double lo = 0.5 * hi;
    const auto band = quad::integrate(g, lo, hi, 0.25 * tol / sphere * std::pow(0.5, k + 1));
    total += band.value;
    err += band.error;
    res.bands = k + 1;
    hi = lo;
    if (band.value <= 0.0) {
      res.tail = 0.0;
      break;
    }
    if (k > 0) {
      const double ratio = band.value / prev_band;
      res.band_ratio = ratio;
      diverging = ratio >= 1.0 - 1e-9 ? diverging + 1 : 0;
      if (diverging >= 2) {
        res.infinite = true;
        break;
      }
      if (ratio < 1.0) {
        // Geometric continuation: the bands scale like eps^{gamma - sp} when Phi ~ t^gamma.
        res.tail = band.value * ratio / (1.0 - ratio);
        const bool stable = prev_ratio > 0.0 && std::abs(ratio - prev_ratio) <= 1e-7 * ratio;
        if (k >= 3 && (res.tail * sphere < 0.25 * tol || stable)) break;
      }
      prev_ratio = ratio;
    }
    prev_band = band.value;
  }
  if (res.infinite) {
    res.value = kInf;
    res.tail = kInf;
    return res;
  }
  res.value = sphere * (total + res.tail);
  res.error_estimate = sphere * err;
  return res;
}

}  // namespace levelset

#include "levelset/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levelset/errors.hpp"
#include "levelset/montecarlo.hpp"
#include "levelset/parallel.hpp"
#include "levelset/quadrature.hpp"
#include "levelset/special.hpp"

namespace levelset {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Quadrature: return "quadrature";
    case Method::Grid: return "grid";
    case Method::MonteCarlo: return "montecarlo";
  }
  return "?";
}

void LevelSetQuery::validate() const {
  if (u.dimension() != v.dimension())
    throw UsageError("u has dimension " + std::to_string(u.dimension()) + " but v has dimension " +
                     std::to_string(v.dimension()));
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("p must be a finite real >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be positive and finite");
}

// ---------------------------------------------------------------------------
// exact identity

namespace {
bool vanishes(const TestFunction& f) { return f.kind() == FunctionKind::Zero || f.sup_norm() == 0.0; }
}  // namespace

MeasureValue exact_single_measure(const LevelSetQuery& q) {
  q.validate();
  const TestFunction* f = nullptr;
  if (vanishes(q.v))
    f = &q.u;
  else if (vanishes(q.u))
    f = &q.v;
  else
    throw UsageError("exact_single_measure requires one of u, v to vanish identically");
  const double norm = f->lp_norm_p_power(q.p);
  const double kappa = unit_ball_volume(q.dimension());
  if (!std::isfinite(norm)) return {kInf, Method::Exact, 0.0};
  return {kappa * norm / std::pow(q.lambda, q.p), Method::Exact, 0.0};
}

// ---------------------------------------------------------------------------
// radial quadrature

namespace {

// Measure on S^{N-1} of the directions w with |r e1 - s w| <= rho.
double angular_measure(int n, double r, double s, double rho) {
  if (!(rho > 0.0)) return 0.0;
  const double full = unit_sphere_area(n);
  if (r == 0.0 || s == 0.0) return std::max(r, s) <= rho ? full : 0.0;
  if (!std::isfinite(rho)) return full;
  const double c0 = (r * r + s * s - rho * rho) / (2.0 * r * s);
  if (c0 <= -1.0) return full;
  if (c0 >= 1.0) return (n == 1 && c0 == 1.0) ? 1.0 : 0.0;
  switch (n) {
    case 1: return 1.0;
    case 2: return 2.0 * std::acos(c0);
    default: return 2.0 * std::numbers::pi * (1.0 - c0);
  }
}

struct RadialSide {
  const TestFunction* f = nullptr;
  RadialView view;
  double support = 0.0;  // effective, finite
  double sup = 0.0;
  double value(double r) const { return radial_profile(*f, view, r); }
};

// sphere_area * int_R^inf r^{N-1} |f(r)|^p dr, summed over doubling shells.
double radial_tail(const RadialSide& side, int n, double p, double R) {
  double total = 0.0;
  for (double a = R; a < 1e6 * std::max(1.0, R); a *= 2.0) {
    auto piece = quad::integrate(
        [&](double r) { return std::pow(r, n - 1) * std::pow(std::abs(side.value(r)), p); }, a, 2.0 * a, 1e-14);
    total += piece.value;
    if (piece.value <= 1e-300 || piece.value < 1e-16 * total) break;
  }
  return unit_sphere_area(n) * total;
}

// Radius beyond which a rapidly decaying profile contributes below `budget`
// to kappa ||f 1_{|x|>R}||_p^p / lambda^p.
double effective_support(const RadialSide& side, int n, double p, double lambda, double budget) {
  if (std::isfinite(side.view.support)) return side.view.support;
  const double kappa = unit_ball_volume(n);
  double R = 1.0;
  for (int i = 0; i < 200; ++i, R *= 1.25) {
    if (kappa * radial_tail(side, n, p, R) / std::pow(lambda, p) <= budget) return R;
  }
  throw UnsupportedError("radial quadrature: profile tail does not decay fast enough");
}

}  // namespace

MeasureValue radial_quadrature_measure(const LevelSetQuery& q, double tol) {
  q.validate();
  if (!(tol > 0.0)) throw UsageError("radial_quadrature_measure: tol must be positive");
  const int n = q.dimension();
  if (n > 3) throw UnsupportedError("radial quadrature supports N <= 3");

  auto ru = q.u.radial();
  auto rv = q.v.radial();
  if (!ru || !rv) throw UnsupportedError("radial quadrature needs u and v radial about a common center");
  if (!ru->any_center && !rv->any_center) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) d2 += (ru->center[i] - rv->center[i]) * (ru->center[i] - rv->center[i]);
    if (d2 > 1e-24) throw UnsupportedError("radial quadrature: u and v are radial about different centers");
  }
  if (ru->any_center) ru->center = rv->center;
  if (rv->any_center) rv->center = ru->center;

  RadialSide outer{&q.u, *ru};
  RadialSide inner{&q.v, *rv};
  outer.sup = q.u.sup_norm();
  inner.sup = q.v.sup_norm();
  // The inner breakpoints assume a piecewise-constant inner profile, so the
  // outer side takes whichever function is singular, smooth or nonzero.
  const auto piecewise = [](const RadialSide& s) {
    return std::isfinite(s.view.support) && s.view.singular_exponent == 0.0;
  };
  if (std::isinf(inner.sup) || inner.view.singular_exponent > 0.0 || (outer.sup == 0.0 && inner.sup > 0.0) ||
      (piecewise(outer) && !piecewise(inner)))
    std::swap(outer, inner);
  if (std::isinf(inner.sup) || inner.view.singular_exponent > 0.0)
    throw UnsupportedError("radial quadrature: at most one unbounded function is supported");
  if ((std::isinf(outer.view.support) && outer.view.singular_exponent > 0.0))
    throw UnsupportedError("radial quadrature: functions must be finitely supported or Gaussian-type");

  const double p = q.p;
  const double lambda = q.lambda;
  const double e = p / n;  // rho = (A / lambda)^{p/N}
  const double alpha = outer.view.singular_exponent;
  if (alpha > 0.0 && alpha * p >= n) return {kInf, Method::Quadrature, tol};

  outer.support = (outer.sup == 0.0) ? 0.0 : effective_support(outer, n, p, lambda, tol / 8.0);
  inner.support = (inner.sup == 0.0) ? 0.0 : effective_support(inner, n, p, lambda, tol / 8.0);
  if (outer.support == 0.0 && inner.support == 0.0) return {0.0, Method::Quadrature, tol};

  const double rho_inner_max = inner.support > 0.0 ? std::pow(inner.sup / lambda, e) : 0.0;
  const double r_max = std::max(outer.support, inner.support > 0.0 ? inner.support + rho_inner_max : 0.0);
  const double kappa = unit_ball_volume(n);
  const double outer_tol = 0.5 * tol;
  const double inner_tol = 0.5 * tol / (kappa * std::pow(r_max, n));

  // Pieces of the inner profile on which v is sampled for kink locations.
  std::vector<double> inner_jumps = inner.view.jumps;
  inner_jumps.push_back(inner.support);

  auto rho_of = [&](double a) { return std::pow(std::abs(a) / lambda, e); };

  auto m_of_r = [&](double r) {
    const double ur = outer.value(r);
    const double s_max = std::max(inner.support, r + (std::isfinite(ur) ? rho_of(ur) : kInf));
    if (!std::isfinite(s_max)) return kInf;
    std::vector<double> pts = inner_jumps;
    double lo = 0.0;
    auto add_kinks = [&](double rho) {
      pts.push_back(r - rho);
      pts.push_back(r + rho);
      pts.push_back(rho - r);
    };
    for (double b : inner_jumps) {
      if (b > lo) add_kinks(rho_of(ur + inner.value(0.5 * (lo + b))));
      lo = b;
    }
    add_kinks(rho_of(ur));
    const auto bp = quad::breakpoints(std::move(pts), 0.0, s_max);
    auto integrand = [&](double s) {
      const double rho = rho_of(ur + inner.value(s));
      return std::pow(s, n - 1) * angular_measure(n, r, s, rho);
    };
    return quad::integrate_pieces(integrand, bp, inner_tol).value;
  };

  // m(r) has kinks where r sits at distance rho(a + b) from a jump, for the
  // piecewise values a of u and b of v; adaptive rules can step over them.
  std::vector<double> outer_pts = outer.view.jumps;
  outer_pts.push_back(outer.support);
  for (double b : inner_jumps) outer_pts.push_back(b);
  {
    auto piece_values = [](const RadialSide& side, const std::vector<double>& ends) {
      std::vector<double> vals{0.0};
      double lo = 0.0;
      for (double b : ends) {
        if (b > lo) {
          const double v = side.value(0.5 * (lo + b));
          if (std::isfinite(v)) vals.push_back(v);
        }
        lo = b;
      }
      return vals;
    };
    std::vector<double> outer_ends = outer.view.jumps;
    outer_ends.push_back(outer.support);
    const auto ov = piece_values(outer, outer_ends);
    const auto iv = piece_values(inner, inner_jumps);
    std::vector<double> anchors = outer_pts;
    anchors.push_back(0.0);
    const std::size_t base = outer_pts.size();
    for (double a : ov)
      for (double b : iv) {
        const double rho = rho_of(a + b);
        if (!(rho > 0.0) || !std::isfinite(rho)) continue;
        for (std::size_t k = 0; k < base + 1; ++k) {
          const double c = anchors[k];
          outer_pts.push_back(c + rho);
          outer_pts.push_back(c - rho);
          outer_pts.push_back(rho - c);
        }
      }
  }
  auto bp = quad::breakpoints(std::move(outer_pts), 0.0, r_max);

  auto g = [&](double r) { return unit_sphere_area(n) * std::pow(r, n - 1) * m_of_r(r); };

  quad::Result total;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i];
    const double b = bp[i + 1];
    const double piece_tol = outer_tol * (b - a) / r_max;
    quad::Result piece;
    if (i == 0 && alpha > 0.0) {
      // r = t^{1/beta} flattens the r^{N-1-alpha p} blow-up at the center.
      const double beta = n - alpha * p;
      piece = quad::integrate(
          [&](double t) {
            if (t <= 0.0) t = 1e-300;
            const double r = std::pow(t, 1.0 / beta);
            return g(r) * r / (beta * t);
          },
          0.0, std::pow(b, beta), piece_tol);
    } else {
      piece = quad::integrate(g, a, b, piece_tol);
    }
    total.value += piece.value;
    total.error += piece.error;
    total.converged = total.converged && piece.converged;
  }
  return {total.value, Method::Quadrature, std::max(tol, total.converged ? 0.0 : total.error)};
}

// ---------------------------------------------------------------------------
// grid oracle

double required_grid_halfwidth(const LevelSetQuery& q, double h) {
  q.validate();
  const auto region = bounding_region(q.u, q.v, q.p, q.lambda);
  double extent = 0.0;
  for (const auto& s : region.strata) {
    double c = 0.0;
    for (double x : s.center) c += x * x;
    extent = std::max(extent, std::sqrt(c) + s.radius + region.rho);
  }
  return extent + h;
}

namespace kernels {

GridInputs make_grid_inputs(const LevelSetQuery& q, double box, double h) {
  GridInputs in;
  const auto n = static_cast<std::int64_t>(std::ceil(2.0 * box / h - 1e-9));
  in.ux.resize(static_cast<std::size_t>(n));
  in.vy.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = -box + (static_cast<double>(i) + 0.5) * h;
    const double y = -box + (static_cast<double>(i) + 1.0) * h;
    in.ux[static_cast<std::size_t>(i)] = q.u.eval(&x);
    in.vy[static_cast<std::size_t>(i)] = q.v.eval(&y);
  }
  const double e = 1.0 / q.p;
  in.threshold.resize(static_cast<std::size_t>(2 * n - 1));
  for (std::int64_t k = -(n - 1); k <= n - 1; ++k) {
    const double d = std::abs(static_cast<double>(k) - 0.5) * h;  // x_i - y_j = (i - j - 1/2) h
    in.threshold[static_cast<std::size_t>(k + n - 1)] = q.lambda * (e == 1.0 ? d : std::pow(d, e));
  }
  double umax = 0.0;
  double vmax = 0.0;
  for (double a : in.ux) umax = std::max(umax, std::abs(a));
  for (double a : in.vy) vmax = std::max(vmax, std::abs(a));
  const double rho = std::pow((umax + vmax) / q.lambda, q.p);
  in.band = std::isfinite(rho) ? std::min<std::int64_t>(n, static_cast<std::int64_t>(rho / h) + 2) : n;
  return in;
}

namespace {

std::int64_t count_row(const GridInputs& in, std::int64_t i) {
  const auto n = static_cast<std::int64_t>(in.ux.size());
  const std::int64_t lo = std::max<std::int64_t>(0, i - in.band);
  const std::int64_t hi = std::min<std::int64_t>(n - 1, i + in.band);
  const double ui = in.ux[static_cast<std::size_t>(i)];
  const double* thr = in.threshold.data() + (i + n - 1);
  std::int64_t hits = 0;
  for (std::int64_t j = lo; j <= hi; ++j) hits += !(std::abs(ui + in.vy[static_cast<std::size_t>(j)]) < thr[-j]);
  return hits;
}

}  // namespace

std::int64_t grid_count_serial(const GridInputs& in) {
  const auto n = static_cast<std::int64_t>(in.ux.size());
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < n; ++i) total += count_row(in, i);
  return total;
}

std::int64_t grid_count_parallel(const GridInputs& in) {
  const auto n = static_cast<std::int64_t>(in.ux.size());
  std::vector<std::int64_t> rows(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = count_row(in, i);
  std::int64_t total = 0;
  for (std::int64_t r : rows) total += r;
  return total;
}

}  // namespace kernels

MeasureValue grid_bruteforce_measure(const LevelSetQuery& q, double box_halfwidth, double h) {
  q.validate();
  if (q.dimension() != 1) throw UnsupportedError("grid oracle is restricted to N = 1");
  if (!(h > 0.0) || !(box_halfwidth > 0.0)) throw UsageError("grid oracle: box and h must be positive");
  const double need = required_grid_halfwidth(q, h);
  if (box_halfwidth < need)
    throw PreconditionError("grid oracle: box half-width " + std::to_string(box_halfwidth) +
                            " does not contain the bounding region; need at least " + std::to_string(need));
  const auto in = kernels::make_grid_inputs(q, box_halfwidth, h);
  const auto hits = kernels::grid_count_parallel(in);
  return {static_cast<double>(hits) * h * h, Method::Grid, std::nullopt};
}

}  // namespace levelset

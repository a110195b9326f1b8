#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace levelset::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod 15-point abscissae (positive half) and weights; the 7-point Gauss rule
// lives on the odd-indexed nodes.
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGauss[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kKronrod[i] * s;
    if (i % 2 == 1) gauss += kGauss[i / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b]: the segment with the largest
/// error estimate is bisected until the summed estimate drops below abs_tol.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, int max_segments = 4000) {
  Result out;
  if (!(b > a)) return out;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  out.evaluations = 15;
  double value = first.value;
  double error = first.error;
  heap.push(first);
  while (error > abs_tol && static_cast<int>(heap.size()) < max_segments) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = error <= abs_tol;
  return out;
}

/// Integrates over [points.front(), points.back()] split at every interior point;
/// the tolerance is shared in proportion to piece length.
template <class F>
Result integrate_pieces(F&& f, std::span<const double> points, double abs_tol) {
  Result out;
  if (points.size() < 2) return out;
  const double total = points.back() - points.front();
  if (!(total > 0.0)) return out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (!(b > a)) continue;
    auto piece = integrate(f, a, b, abs_tol * (b - a) / total);
    out.value += piece.value;
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    out.converged = out.converged && piece.converged;
  }
  return out;
}

/// Sorted, de-duplicated breakpoints clipped to [lo, hi], with lo and hi included.
inline std::vector<double> breakpoints(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out{lo, hi};
  for (double t : pts)
    if (t > lo && t < hi && std::isfinite(t)) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Geometric grading toward `at` inside [lo, hi]: points at + scale * 2^k on the
/// side(s) of `at` that lie in the interval, so kernel peaks near `at` fall on
/// short segments.
inline void add_graded(std::vector<double>& pts, double at, double scale, double lo, double hi) {
  if (!(scale > 0.0)) return;
  for (double d = scale; d < hi - lo; d *= 2.0) {
    if (at + d < hi && at + d > lo) pts.push_back(at + d);
    if (at - d > lo && at - d < hi) pts.push_back(at - d);
  }
  if (at > lo && at < hi) pts.push_back(at);
}

}  // namespace levelset::quad

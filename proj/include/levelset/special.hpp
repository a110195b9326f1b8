#pragma once

namespace levelset {

/// Volume of the unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// Surface area of the unit sphere S^{n-1} in R^n (= n * unit_ball_volume(n)).
double unit_sphere_area(int n);

/// Regularized lower incomplete gamma P(a, x) for a a positive multiple of 1/2.
double gamma_p_half(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without
/// cancellation for large x.
double gamma_q_half(double a, double x);

}  // namespace levelset

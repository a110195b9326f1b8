#include "levelset/special.hpp"

#include <cmath>
#include <numbers>

#include "levelset/errors.hpp"

namespace levelset {

double unit_ball_volume(int n) {
  if (n < 0) throw UsageError("unit_ball_volume: dimension must be >= 0");
  // kappa_n = kappa_{n-2} * 2 pi / n, kappa_0 = 1, kappa_1 = 2.
  double k = (n % 2 == 0) ? 1.0 : 2.0;
  for (int m = (n % 2 == 0) ? 2 : 3; m <= n; m += 2) k *= 2.0 * std::numbers::pi / m;
  return k;
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

namespace {

void check_half_integer(double a) {
  const double twice = 2.0 * a;
  if (a <= 0.0 || twice != std::floor(twice))
    throw UsageError("incomplete gamma: a must be a positive multiple of 1/2");
}

// x^a e^{-x} / Gamma(a + 1)
double gamma_term(double a, double x) {
  if (x == 0.0) return 0.0;
  return std::exp(a * std::log(x) - x - std::lgamma(a + 1.0));
}

double series_p(double a, double x) {
  // P(a, x) = x^a e^{-x} / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return gamma_term(a, x) * sum;
}

}  // namespace

double gamma_q_half(double a, double x) {
  check_half_integer(a);
  if (x < 0.0) throw UsageError("incomplete gamma: x must be >= 0");
  if (x < a + 1.0) return 1.0 - series_p(a, x);
  // Upward recurrence Q(b+1, x) = Q(b, x) + x^b e^{-x} / Gamma(b+1); all terms positive.
  double b = (std::fmod(2.0 * a, 2.0) == 1.0) ? 0.5 : 1.0;
  double q = (b == 0.5) ? std::erfc(std::sqrt(x)) : std::exp(-x);
  while (b < a) {
    q += gamma_term(b, x);
    b += 1.0;
  }
  return q;
}

double gamma_p_half(double a, double x) {
  check_half_integer(a);
  if (x < 0.0) throw UsageError("incomplete gamma: x must be >= 0");
  if (x < a + 1.0) return series_p(a, x);
  return 1.0 - gamma_q_half(a, x);
}

}  // namespace levelset

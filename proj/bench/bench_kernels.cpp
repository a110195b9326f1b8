// Wall-clock timings of the hot kernels, serial against all workers.
// Usage: bench_kernels [samples]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "levelset/measure.hpp"
#include "levelset/montecarlo.hpp"
#include "levelset/parallel.hpp"
#include "levelset/weaknorm.hpp"

using namespace levelset;

namespace {

double seconds(const std::function<void()>& f, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

TestFunction ind(double a, double b) { return TestFunction::shifted({0.5 * (a + b)}, TestFunction::ball(1, 1.0, 0.5 * (b - a))); }

void row(const char* name, const std::function<void()>& f) {
  set_worker_count(1);
  const double serial = seconds(f);
  set_worker_count(0);
  const double parallel = seconds(f);
  std::printf("%-34s %10.4f %10.4f %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1000000;
  set_worker_count(0);
  std::printf("workers: %d, samples: %llu\n", worker_count(), static_cast<unsigned long long>(n));
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "all s", "speedup");

  const auto u1 = ind(0, 1);
  const auto v1 = ind(4, 5);
  row("mc measure N=1 separated", [&] { estimate_measure({u1, v1, 1.0, 0.1}, n, 42); });
  const auto u2 = TestFunction::ball(2, 1.0, 1.0);
  const auto v2 = TestFunction::shifted({3.0, 0.0}, TestFunction::ball(2, -1.0, 1.0));
  row("mc measure N=2 discs", [&] { estimate_measure({u2, v2, 2.0, 0.5}, n, 42); });
  const auto u3 = TestFunction::gaussian(3);
  row("mc measure N=3 truncated gaussian",
      [&] { estimate_measure({TestFunction::truncated(3.0, u3), TestFunction::zero(3), 2.0, 1.0}, n, 42); });
  row("mc sweep (11 lambdas)", [&] {
    std::vector<double> sched;
    for (int k = 0; k <= 10; ++k) sched.push_back(std::ldexp(1.0, -k));
    estimate_sweep(u1, v1, 1.0, sched, n / 10, 42);
  });
  row("weak quasinorm (33 + 6 lambdas)",
      [&] { weak_quasinorm_p_power(u1, v1, 1.0, default_lambda_grid(), n / 20, 42, 6); });
  row("grid oracle h=1e-3", [&] { grid_bruteforce_measure({u1, v1, 1.0, 0.5}, 10.0, 1e-3); });
  row("gagliardo interval s=1/2", [&] { gagliardo_seminorm_p_power(u1, 0.5, 1.0, 1e-10); });
  return 0;
}

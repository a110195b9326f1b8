#include "levelset/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace levelset {

namespace {

int machine_workers() {
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

std::atomic<int> g_workers{0};

}  // namespace

int worker_count() {
  const int n = g_workers.load(std::memory_order_relaxed);
  return n > 0 ? n : machine_workers();
}

void set_worker_count(int n) { g_workers.store(n > 0 ? n : 0, std::memory_order_relaxed); }

int configure_workers_from_env() {
  if (const char* env = std::getenv("LEVELSET_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) set_worker_count(n);
    } catch (const std::exception&) {
      // ignored: malformed values leave the default in place
    }
  }
  return worker_count();
}

}  // namespace levelset

#pragma once

namespace levelset {

/// Worker count used by the OpenMP kernels. Defaults to the machine parallelism.
int worker_count();

/// Caps the kernels at `n` workers; n <= 0 restores the default.
void set_worker_count(int n);

/// Applies LEVELSET_THREADS when set to a positive integer. Returns the
/// resulting worker count.
int configure_workers_from_env();

}  // namespace levelset

// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_PARALLEL_H_
#define RESTORELAB_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace restorelab {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (<= 1 runs inline).
/// Work is claimed dynamically, so fn must write only to slot i of any
/// shared output. If any call throws, the exception from the smallest index
/// is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

/// Worker count from RESTORELAB_THREADS, else hardware concurrency, else 1.
int default_thread_count();

}  // namespace restorelab

#endif  // RESTORELAB_PARALLEL_H_

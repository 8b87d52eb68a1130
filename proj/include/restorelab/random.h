// SPDX-License-Identifier: Apache-2.0
//
// Seeded random numbers with fully specified output. The standard library's
// distribution objects are implementation-defined, so uniform and normal
// variates are derived here directly from the 64-bit engine.

#ifndef RESTORELAB_RANDOM_H_
#define RESTORELAB_RANDOM_H_

#include <cstdint>
#include <random>

namespace restorelab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], both inclusive.
  long long uniform_int(long long lo, long long hi);

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Mixes a master seed and an item index into an independent stream seed
/// (splitmix64 finalizer), so per-item results do not depend on the order in
/// which items are processed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace restorelab

#endif  // RESTORELAB_RANDOM_H_

#pragma once

#include <cmath>
#include <cstdint>

namespace ipcfuse {

/// Counter-based deterministic random generator. Each (seed, stream) pair is
/// an independent sequence; draw i depends only on (seed, stream, i), so
/// adding draws to one stream never perturbs another. Output is identical
/// across platforms and thread schedules.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1. Unbiased via rejection.
  uint64_t uniform_int(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Poisson by inversion; suitable for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double l = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

  /// Geometric number of failures before the first success, success
  /// probability p in (0, 1].
  int geometric(double p) {
    if (p >= 1.0) return 0;
    int k = 0;
    while (uniform() >= p && k < 1000000) ++k;
    return k;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace ipcfuse

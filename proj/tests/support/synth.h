// SPDX-License-Identifier: Apache-2.0
//
// Speech-like test material: voiced harmonic stacks with a gliding pitch,
// formant-shaped spectra, syllable-rate envelopes and a breath-noise floor
// that extends to the top of the band.

#ifndef RESTORELAB_TESTS_SYNTH_H_
#define RESTORELAB_TESTS_SYNTH_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "support/oracles.h"

namespace synth {

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> speech(std::size_t n, int rate, std::uint64_t seed,
                                  double peak = 0.5) {
  std::mt19937_64 rng(seed);
  const double f0_base = 95.0 + 120.0 * unit(rng);
  const double glide = 0.5 + unit(rng);
  const double syllable_hz = 3.0 + 2.5 * unit(rng);
  const double formants[3] = {500.0 + 400.0 * unit(rng), 1400.0 + 900.0 * unit(rng),
                              2600.0 + 700.0 * unit(rng)};
  std::vector<double> x(n, 0.0);
  double phase = 0.0;
  const double nyq = 0.5 * rate;
  // Per-harmonic tilt 0.15 k^-0.6 and 1/sqrt(k) weight, for the lowest f0.
  const auto max_k = static_cast<std::size_t>(nyq / (f0_base * 0.88)) + 2;
  std::vector<double> tilt(max_k + 1), weight(max_k + 1);
  for (std::size_t k = 1; k <= max_k; ++k) {
    tilt[k] = 0.15 / std::pow(static_cast<double>(k), 0.6);
    weight[k] = 1.0 / std::sqrt(static_cast<double>(k));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double f0 = f0_base * (1.0 + 0.12 * std::sin(2.0 * oracle::kPi * glide * t));
    phase += 2.0 * oracle::kPi * f0 / rate;
    // sin(k phase) by the Chebyshev recurrence.
    const double c2 = 2.0 * std::cos(phase);
    double s_prev = 0.0, s_cur = std::sin(phase);
    double v = 0.0;
    for (std::size_t k = 1; k * f0 < nyq * 0.95; ++k) {
      const double f = k * f0;
      double env = tilt[k];
      for (double fm : formants) {
        const double d = (f - fm) / 180.0;
        env += 1.0 / (1.0 + d * d);
      }
      v += env * s_cur * weight[k];
      const double s_next = c2 * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    const double syl = 0.5 - 0.5 * std::cos(2.0 * oracle::kPi * syllable_hz * t);
    x[i] = v * (0.15 + 0.85 * syl);
  }
  // Breath noise, first-differenced so it leans towards high frequencies.
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * unit(rng) - 1.0;
    x[i] += 0.08 * (w - prev);
    prev = w;
  }
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (double& v : x) v *= peak / m;
  }
  return x;
}

}  // namespace synth

#endif  // RESTORELAB_TESTS_SYNTH_H_

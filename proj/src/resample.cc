// SPDX-License-Identifier: Apache-2.0

#include "restorelab/resample.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace restorelab {
namespace {

constexpr int kHalfWidth = ResamplerSpec::kTapsPerPhase / 2;  // low-rate samples
constexpr int kTableDensity = 2048;                            // entries per sample

// g(u) = sinc(2 fc u) * kaiser(u / half_width) for u in [0, half_width].
const std::vector<double>& prototype_table() {
  static const std::vector<double> table = [] {
    const double beta = kaiser_beta(ResamplerSpec::kStopbandDb);
    const double norm = bessel_i0(beta);
    const double fc = ResamplerSpec::kCutoff;
    std::vector<double> t(static_cast<std::size_t>(kHalfWidth * kTableDensity) + 2, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double u = static_cast<double>(i) / kTableDensity;
      if (u > kHalfWidth) break;
      const double x = u / kHalfWidth;
      const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - x * x))) / norm;
      const double arg = 2.0 * fc * u * std::numbers::pi;
      const double sinc = u == 0.0 ? 1.0 : std::sin(arg) / arg;
      t[i] = sinc * win;
    }
    return t;
  }();
  return table;
}

inline double prototype(const std::vector<double>& table, double u) {
  u = std::abs(u) * kTableDensity;
  const std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= table.size()) return 0.0;
  const double frac = u - static_cast<double>(i);
  return table[i] + frac * (table[i + 1] - table[i]);
}

}  // namespace

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double half = 0.5 * x;
  for (int k = 1; k < 500; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double kaiser_beta(double stopband_db) {
  if (stopband_db > 50.0) return 0.1102 * (stopband_db - 8.7);
  if (stopband_db >= 21.0) {
    return 0.5842 * std::pow(stopband_db - 21.0, 0.4) +
           0.07886 * (stopband_db - 21.0);
  }
  return 0.0;
}

AudioBuffer resample(const AudioBuffer& audio, int to_rate) {
  if (to_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  if (audio.sample_rate <= 0) {
    throw std::invalid_argument("resample: source rate must be positive");
  }
  if (to_rate == audio.sample_rate) return audio;

  const std::int64_t from = audio.sample_rate;
  const std::int64_t to = to_rate;
  const std::int64_t len = static_cast<std::int64_t>(audio.size());
  const std::int64_t out_len = (len * to + from / 2) / from;

  const double ratio = std::min(1.0, static_cast<double>(to) / from);
  const double gain = 2.0 * ResamplerSpec::kCutoff * ratio;
  const double reach = kHalfWidth / ratio;  // in input samples
  const auto& table = prototype_table();
  const double* x = audio.samples.data();

  AudioBuffer out(std::vector<double>(static_cast<std::size_t>(out_len), 0.0), to_rate);
  for (std::int64_t k = 0; k < out_len; ++k) {
    // Output k sits at input position k * from / to.
    const std::int64_t num = k * from;
    const std::int64_t base = num / to;
    const double t = static_cast<double>(base) + static_cast<double>(num % to) / to;
    const std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(t - reach)));
    const std::int64_t hi = std::min<std::int64_t>(len - 1, static_cast<std::int64_t>(std::floor(t + reach)));
    double acc = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) {
      acc += x[n] * prototype(table, (t - static_cast<double>(n)) * ratio);
    }
    out.samples[static_cast<std::size_t>(k)] = gain * acc;
  }
  return out;
}

}  // namespace restorelab

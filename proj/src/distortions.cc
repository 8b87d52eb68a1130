// SPDX-License-Identifier: Apache-2.0

#include "restorelab/distortions.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "restorelab/convolve.h"
#include "restorelab/resample.h"

namespace restorelab {

AudioBuffer clip(const AudioBuffer& x, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("clip: eta must lie in [0, 1]");
  }
  AudioBuffer out = x;
  for (double& v : out.samples) v = std::max(std::min(v, eta), -eta);
  return out;
}

AudioBuffer reverberate(const AudioBuffer& x, const AudioBuffer& rir) {
  return convolve(x, rir);
}

int lowpass_intermediate_rate(double cutoff_hz) {
  return static_cast<int>(std::lround(2.0 * cutoff_hz));
}

AudioBuffer lowpass_resample(const AudioBuffer& x, const LowpassSpec& spec) {
  const IirFilter f =
      design_lowpass(spec.family, spec.cutoff_hz, spec.order, x.sample_rate);
  const int mid_rate = lowpass_intermediate_rate(spec.cutoff_hz);
  AudioBuffer out = resample(resample(filter(x, f), mid_rate), x.sample_rate);
  out.samples.resize(x.size(), 0.0);
  return out;
}

AudioBuffer tile_noise(const AudioBuffer& noise, std::size_t offset,
                       std::size_t length) {
  if (noise.empty()) throw std::invalid_argument("tile_noise: empty noise");
  AudioBuffer out(std::vector<double>(length), noise.sample_rate);
  std::size_t j = offset % noise.size();
  for (std::size_t i = 0; i < length; ++i) {
    out.samples[i] = noise.samples[j];
    if (++j == noise.size()) j = 0;
  }
  return out;
}

double mean_abs(const AudioBuffer& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x.samples) acc += std::abs(v);
  return acc / static_cast<double>(x.size());
}

AudioBuffer add_noise(const AudioBuffer& x, const AudioBuffer& noise,
                      double snr_db) {
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("add_noise: snr must be finite");
  }
  if (x.sample_rate != noise.sample_rate) {
    throw std::invalid_argument("add_noise: sample rate mismatch");
  }
  const AudioBuffer n = tile_noise(noise, 0, x.size());
  const double noise_level = mean_abs(n);
  if (!(noise_level > 0.0)) {
    throw std::invalid_argument("add_noise: noise segment is silent");
  }
  const double gain = mean_abs(x) / noise_level / std::pow(10.0, snr_db / 20.0);
  AudioBuffer out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += gain * n.samples[i];
  return out;
}

AudioBuffer scale(const AudioBuffer& x, double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("scale: q must be finite");
  AudioBuffer out = x;
  for (double& v : out.samples) v *= q;
  return out;
}

}  // namespace restorelab

// SPDX-License-Identifier: Apache-2.0

#include "restorelab/convolve.h"

#include <algorithm>
#include <stdexcept>

#include "restorelab/fft.h"

namespace restorelab {

AudioBuffer convolve(const AudioBuffer& audio, const AudioBuffer& kernel) {
  if (audio.sample_rate != kernel.sample_rate) {
    throw std::invalid_argument("convolve: sample rate mismatch (" +
                                std::to_string(audio.sample_rate) + " vs " +
                                std::to_string(kernel.sample_rate) + ")");
  }
  if (audio.empty() || kernel.empty()) {
    return AudioBuffer({}, audio.sample_rate);
  }
  const std::size_t out_len = audio.size() + kernel.size() - 1;
  if (std::min(audio.size(), kernel.size()) <= kDirectConvolutionMax) {
    const auto& longer = audio.size() >= kernel.size() ? audio.samples : kernel.samples;
    const auto& shorter = audio.size() >= kernel.size() ? kernel.samples : audio.samples;
    std::vector<double> out(out_len, 0.0);
    for (std::size_t k = 0; k < shorter.size(); ++k) {
      const double h = shorter[k];
      if (h == 0.0) continue;
      for (std::size_t i = 0; i < longer.size(); ++i) out[i + k] += h * longer[i];
    }
    return AudioBuffer(std::move(out), audio.sample_rate);
  }
  const std::size_t n = next_pow2(out_len);

  std::vector<double> a(n, 0.0);
  std::vector<double> b(n, 0.0);
  std::copy(audio.samples.begin(), audio.samples.end(), a.begin());
  std::copy(kernel.samples.begin(), kernel.samples.end(), b.begin());
  auto fa = rfft(a);
  const auto fb = rfft(b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> full = irfft(fa, n);
  full.resize(out_len);
  return AudioBuffer(std::move(full), audio.sample_rate);
}

}  // namespace restorelab

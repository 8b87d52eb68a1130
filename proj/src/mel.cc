// SPDX-License-Identifier: Apache-2.0

#include "restorelab/mel.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace restorelab {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank mel_filterbank(int n_fft, int n_mels, int sample_rate,
                             double f_min, double f_max, MelNorm norm) {
  if (n_fft < 2 || sample_rate <= 0) {
    throw std::invalid_argument("mel_filterbank: invalid n_fft or sample rate");
  }
  if (n_mels < 1) throw std::invalid_argument("mel_filterbank: n_mels < 1");
  const double nyquist = 0.5 * sample_rate;
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= nyquist)) {
    throw std::invalid_argument(
        "mel_filterbank: need 0 <= f_min < f_max <= sample_rate/2");
  }

  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  const std::size_t mels = static_cast<std::size_t>(n_mels);
  if (mels > bins) {
    throw std::invalid_argument("mel_filterbank: n_mels exceeds FFT bins");
  }

  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(mels + 1));
  }

  MelFilterbank fb;
  fb.weights = Grid<double>(bins, mels, 0.0);
  fb.sample_rate = sample_rate;
  fb.n_fft = n_fft;
  for (std::size_t m = 0; m < mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    const double scale = norm == MelNorm::kArea ? 2.0 / (hi - lo) : 1.0;
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rise, fall));
      if (w > 0.0) {
        fb.weights(k, m) = w * scale;
        any = true;
      }
    }
    if (!any) {
      throw std::invalid_argument(
          "mel_filterbank: filter " + std::to_string(m) +
          " covers no FFT bin; too many mel bands for n_fft=" +
          std::to_string(n_fft));
    }
  }
  return fb;
}

MelFilterbank mel_filterbank(int n_fft, int sample_rate, const MelConfig& cfg) {
  const double f_max = cfg.f_max > 0.0 ? cfg.f_max : 0.5 * sample_rate;
  return mel_filterbank(n_fft, cfg.n_mels, sample_rate, cfg.f_min, f_max,
                        cfg.norm);
}

MelSpectrogram apply_mel(const MagnitudeSpectrogram& mag,
                         const MelFilterbank& fb) {
  if (mag.freqs() != fb.freqs()) {
    throw std::invalid_argument(
        "apply_mel: spectrogram has " + std::to_string(mag.freqs()) +
        " bins, filterbank expects " + std::to_string(fb.freqs()));
  }
  const std::size_t frames = mag.frames();
  const std::size_t bins = fb.freqs();
  const std::size_t mels = fb.mels();
  MelSpectrogram out;
  out.bins = Grid<double>(frames, mels, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto in = mag.bins.row(t);
    auto dst = out.bins.row(t);
    for (std::size_t k = 0; k < bins; ++k) {
      const double v = in[k];
      if (v == 0.0) continue;
      const auto w = fb.weights.row(k);
      for (std::size_t m = 0; m < mels; ++m) dst[m] += v * w[m];
    }
  }
  return out;
}

}  // namespace restorelab

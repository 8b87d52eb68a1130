// SPDX-License-Identifier: Apache-2.0

#include "restorelab/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "restorelab/fft.h"

namespace restorelab {
namespace {

// Reflection without edge repeat (x[-1] == x[1]); periodic for pads longer
// than the signal.
std::size_t reflect_index(long long i, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * static_cast<long long>(n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<long long>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

void check_config(int window_size, int hop) {
  if (hop <= 0) throw std::invalid_argument("stft: hop must be positive");
  if (window_size < 2) {
    throw std::invalid_argument("stft: window_size must be >= 2");
  }
  if (window_size < hop) {
    throw std::invalid_argument("stft: window_size must be >= hop");
  }
}

}  // namespace

std::vector<double> hann_window(int size) {
  std::vector<double> w(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / size);
  }
  return w;
}

std::size_t frame_count(std::size_t length, int hop) {
  return length / static_cast<std::size_t>(hop) + 1;
}

ComplexSpectrogram stft(const AudioBuffer& audio, int window_size, int hop) {
  check_config(window_size, hop);
  if (audio.empty()) throw std::invalid_argument("stft: empty input");

  const std::size_t n = audio.size();
  const std::size_t frames = frame_count(n, hop);
  const std::size_t bins = static_cast<std::size_t>(window_size) / 2 + 1;
  const long long half = window_size / 2;
  const std::vector<double> window = hann_window(window_size);

  ComplexSpectrogram out;
  out.bins = Grid<std::complex<double>>(frames, bins);
  out.window_size = window_size;
  out.hop = hop;
  out.sample_rate = audio.sample_rate;

  std::vector<double> frame(static_cast<std::size_t>(window_size));
  for (std::size_t t = 0; t < frames; ++t) {
    const long long start = static_cast<long long>(t) * hop - half;
    for (int k = 0; k < window_size; ++k) {
      const long long pos = start + k;
      const double v =
          (pos >= 0 && pos < static_cast<long long>(n))
              ? audio.samples[static_cast<std::size_t>(pos)]
              : audio.samples[reflect_index(pos, n)];
      frame[static_cast<std::size_t>(k)] = v * window[static_cast<std::size_t>(k)];
    }
    const auto spectrum = rfft(frame);
    std::copy(spectrum.begin(), spectrum.end(), out.bins.row(t).begin());
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec, std::size_t out_len) {
  check_config(spec.window_size, spec.hop);
  const std::size_t frames = spec.frames();
  const std::size_t window_size = static_cast<std::size_t>(spec.window_size);
  if (spec.freqs() != window_size / 2 + 1) {
    throw std::invalid_argument("istft: bin count does not match window size");
  }
  AudioBuffer out(std::vector<double>(out_len, 0.0), spec.sample_rate);
  if (frames == 0 || out_len == 0) return out;

  const std::size_t hop = static_cast<std::size_t>(spec.hop);
  const std::size_t half = window_size / 2;
  // Samples past frames*hop are not reliably covered; they stay zero.
  const std::size_t span = std::min(out_len, frames * hop);
  const std::vector<double> window = hann_window(spec.window_size);

  std::vector<double> acc(span, 0.0);
  std::vector<double> envelope(span, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto row = spec.bins.row(t);
    const std::vector<double> frame = irfft(row, window_size);
    for (std::size_t k = 0; k < window_size; ++k) {
      // padded coordinate t*hop + k maps to original t*hop + k - half
      const long long pos = static_cast<long long>(t * hop + k) -
                            static_cast<long long>(half);
      if (pos < 0 || pos >= static_cast<long long>(span)) continue;
      const std::size_t p = static_cast<std::size_t>(pos);
      acc[p] += frame[k] * window[k];
      envelope[p] += window[k] * window[k];
    }
  }

  const double peak = *std::max_element(envelope.begin(), envelope.end());
  const double floor = peak * 1e-6;
  for (std::size_t i = 0; i < span; ++i) {
    if (!(envelope[i] > floor)) {
      throw std::invalid_argument(
          "istft: window " + std::to_string(spec.window_size) + " / hop " +
          std::to_string(spec.hop) +
          " does not satisfy the overlap-add condition (envelope vanishes at "
          "sample " +
          std::to_string(i) + ")");
    }
    out.samples[i] = acc[i] / envelope[i];
  }
  return out;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram out;
  out.bins = Grid<double>(spec.frames(), spec.freqs());
  out.window_size = spec.window_size;
  out.hop = spec.hop;
  out.sample_rate = spec.sample_rate;
  const auto& in = spec.bins.data();
  auto& dst = out.bins.data();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = std::abs(in[i]);
  return out;
}

MagnitudeSpectrogram magnitude_spectrogram(const AudioBuffer& audio,
                                           int window_size, int hop) {
  return magnitude(stft(audio, window_size, hop));
}

ComplexSpectrogram with_phase(const MagnitudeSpectrogram& mag,
                              const ComplexSpectrogram& phase_source) {
  require_same_shape(mag.bins, phase_source.bins, "with_phase");
  ComplexSpectrogram out = phase_source;
  auto& dst = out.bins.data();
  const auto& m = mag.bins.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double a = std::abs(dst[i]);
    dst[i] = a > 0.0 ? dst[i] * (m[i] / a) : std::complex<double>(m[i], 0.0);
  }
  return out;
}

}  // namespace restorelab

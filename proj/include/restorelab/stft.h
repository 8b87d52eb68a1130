// SPDX-License-Identifier: Apache-2.0
//
// Short-time Fourier analysis and overlap-add synthesis.
//
// Frames are centred: the signal is reflection-padded by window_size/2 on
// both sides, so frame t is centred on sample t*hop and a signal of length L
// yields floor(L/hop)+1 frames. The window is a periodic Hann.

#ifndef RESTORELAB_STFT_H_
#define RESTORELAB_STFT_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "restorelab/audio.h"

namespace restorelab {

struct StftConfig {
  int window_size = 2048;
  int hop = 441;
};

struct ComplexSpectrogram {
  Grid<std::complex<double>> bins;  // T x (window_size/2 + 1)
  int window_size = 0;
  int hop = 0;
  int sample_rate = 0;

  std::size_t frames() const { return bins.rows(); }
  std::size_t freqs() const { return bins.cols(); }
};

struct MagnitudeSpectrogram {
  Grid<double> bins;  // T x F, non-negative
  int window_size = 0;
  int hop = 0;
  int sample_rate = 0;

  std::size_t frames() const { return bins.rows(); }
  std::size_t freqs() const { return bins.cols(); }
};

std::vector<double> hann_window(int size);

/// Number of centred frames for a signal of `length` samples.
std::size_t frame_count(std::size_t length, int hop);

ComplexSpectrogram stft(const AudioBuffer& audio, int window_size, int hop);
inline ComplexSpectrogram stft(const AudioBuffer& audio,
                               const StftConfig& cfg = {}) {
  return stft(audio, cfg.window_size, cfg.hop);
}

/// Weighted overlap-add inverse. Each frame is windowed again and the sum is
/// divided by the accumulated squared window. Throws std::invalid_argument if
/// that envelope vanishes anywhere inside the reconstructed span, i.e. the
/// window/hop pair cannot reconstruct the signal.
AudioBuffer istft(const ComplexSpectrogram& spec, std::size_t out_len);

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec);

/// |STFT(x)| shorthand.
MagnitudeSpectrogram magnitude_spectrogram(const AudioBuffer& audio,
                                           int window_size, int hop);
inline MagnitudeSpectrogram magnitude_spectrogram(const AudioBuffer& audio,
                                                  const StftConfig& cfg = {}) {
  return magnitude_spectrogram(audio, cfg.window_size, cfg.hop);
}

/// Combines a magnitude grid with the phase of `phase_source`; both must have
/// the same shape.
ComplexSpectrogram with_phase(const MagnitudeSpectrogram& mag,
                              const ComplexSpectrogram& phase_source);

}  // namespace restorelab

#endif  // RESTORELAB_STFT_H_

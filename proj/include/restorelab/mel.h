// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_MEL_H_
#define RESTORELAB_MEL_H_

#include "restorelab/audio.h"
#include "restorelab/stft.h"

namespace restorelab {

enum class MelNorm {
  kNone,  // triangles peak at 1
  kArea,  // each triangle scaled by 2 / (upper edge - lower edge)
};

struct MelConfig {
  int n_mels = 128;
  double f_min = 0.0;
  double f_max = -1.0;  // <= 0 means Nyquist
  MelNorm norm = MelNorm::kNone;
};

double hz_to_mel(double hz);  // HTK: 2595 * log10(1 + hz / 700)
double mel_to_hz(double mel);

/// F x F' matrix W such that a mel frame is |X| W.
struct MelFilterbank {
  Grid<double> weights;
  int sample_rate = 0;
  int n_fft = 0;

  std::size_t freqs() const { return weights.rows(); }
  std::size_t mels() const { return weights.cols(); }
};

struct MelSpectrogram {
  Grid<double> bins;  // T x F'

  std::size_t frames() const { return bins.rows(); }
  std::size_t mels() const { return bins.cols(); }
};

/// Triangular filters equally spaced on the HTK mel scale. Throws if any
/// filter falls between FFT bins and would be identically zero.
MelFilterbank mel_filterbank(int n_fft, int n_mels, int sample_rate,
                             double f_min, double f_max,
                             MelNorm norm = MelNorm::kNone);
MelFilterbank mel_filterbank(int n_fft, int sample_rate, const MelConfig& cfg);

MelSpectrogram apply_mel(const MagnitudeSpectrogram& mag,
                         const MelFilterbank& fb);

}  // namespace restorelab

#endif  // RESTORELAB_MEL_H_

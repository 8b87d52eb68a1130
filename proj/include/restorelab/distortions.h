// SPDX-License-Identifier: Apache-2.0
//
// Atomic degradation operators. Each is a pure function of its inputs.

#ifndef RESTORELAB_DISTORTIONS_H_
#define RESTORELAB_DISTORTIONS_H_

#include <cstddef>

#include "restorelab/audio.h"
#include "restorelab/iir.h"

namespace restorelab {

struct ClipSpec {
  double eta = 1.0;
};

struct LowpassSpec {
  FilterFamily family = FilterFamily::kButterworth;
  double cutoff_hz = 8000.0;
  int order = 4;
};

struct NoiseSpec {
  double snr_db = 20.0;
};

/// Hard clipping to [-eta, eta]. Throws unless 0 <= eta <= 1.
AudioBuffer clip(const AudioBuffer& x, double eta);
inline AudioBuffer clip(const AudioBuffer& x, const ClipSpec& spec) {
  return clip(x, spec.eta);
}

/// Full convolution with the room response, length len(x) + len(rir) - 1.
AudioBuffer reverberate(const AudioBuffer& x, const AudioBuffer& rir);

/// Rate used for the intermediate resampling step of lowpass_resample.
int lowpass_intermediate_rate(double cutoff_hz);

/// Lowpass filter, resample to round(2 * cutoff) Hz and back. The result is
/// trimmed or zero-padded to the input length.
AudioBuffer lowpass_resample(const AudioBuffer& x, const LowpassSpec& spec);

/// Noise segment of exactly `length` samples starting at `offset`, wrapping
/// around the end of `noise` as often as needed.
AudioBuffer tile_noise(const AudioBuffer& noise, std::size_t offset,
                       std::size_t length);

/// Mixes noise at a mean-absolute-value ratio of snr_db:
///   n <- n * mean|x| / mean|n|,  out = x + n / 10^(snr_db / 20).
/// Noise shorter or longer than x is tiled or cropped from sample 0. Throws
/// if the used noise segment is silent.
AudioBuffer add_noise(const AudioBuffer& x, const AudioBuffer& noise,
                      double snr_db);

AudioBuffer scale(const AudioBuffer& x, double q);

double mean_abs(const AudioBuffer& x);

}  // namespace restorelab

#endif  // RESTORELAB_DISTORTIONS_H_

// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_RESAMPLE_H_
#define RESTORELAB_RESAMPLE_H_

#include "restorelab/audio.h"

namespace restorelab {

/// Anti-aliasing prototype parameters. The prototype is a Kaiser-windowed
/// sinc spanning `taps_per_phase` samples at the lower of the two rates.
struct ResamplerSpec {
  static constexpr int kTapsPerPhase = 64;
  static constexpr double kStopbandDb = 80.0;
  static constexpr double kCutoff = 0.46;  // fraction of the lower rate
};

/// Rational-rate polyphase resampling. The filter phase for each output
/// sample is read from a densely tabulated prototype, so arbitrary integer
/// rate pairs (e.g. 44100 -> 3001) cost the same as simple ones. Output
/// length is round(len * to_rate / from_rate); equal rates return an exact
/// copy.
AudioBuffer resample(const AudioBuffer& audio, int to_rate);

double kaiser_beta(double stopband_db);
double bessel_i0(double x);

}  // namespace restorelab

#endif  // RESTORELAB_RESAMPLE_H_

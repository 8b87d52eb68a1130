// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_CONVOLVE_H_
#define RESTORELAB_CONVOLVE_H_

#include "restorelab/audio.h"

namespace restorelab {

#include <cstddef>

/// Operands no longer than this are convolved directly, which keeps a unit
/// impulse an exact identity.
inline constexpr std::size_t kDirectConvolutionMax = 32;

/// Full linear convolution, output length L + K - 1. FFT-based unless one
/// operand is short. Both buffers must share a sample rate.
AudioBuffer convolve(const AudioBuffer& audio, const AudioBuffer& kernel);

}  // namespace restorelab

#endif  // RESTORELAB_CONVOLVE_H_

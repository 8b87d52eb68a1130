// SPDX-License-Identifier: Apache-2.0

#include "restorelab/audio.h"

#include <cmath>

namespace restorelab {

void validate(const AudioBuffer& audio, const char* what) {
  if (audio.sample_rate <= 0) {
    throw std::invalid_argument(std::string(what) +
                                ": sample rate must be positive");
  }
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    if (!std::isfinite(audio.samples[i])) {
      throw std::invalid_argument(std::string(what) +
                                  ": non-finite sample at index " +
                                  std::to_string(i));
    }
  }
}

}  // namespace restorelab

// SPDX-License-Identifier: Apache-2.0
//
// Vocoder training criteria as plain loss kernels. Every norm is
// mean-reduced over its entries so values do not depend on grid size.

#ifndef RESTORELAB_LOSSES_H_
#define RESTORELAB_LOSSES_H_

#include <span>
#include <vector>

#include "restorelab/audio.h"
#include "restorelab/mel.h"
#include "restorelab/stft.h"

namespace restorelab {

inline constexpr double kLossFloor = 1e-8;
inline constexpr double kSpectralConvergenceCap = 100.0;

struct LossWeights {
  double mel = 50.0;
  double sc = 5.0;
  double mag = 5.0;
  double seg = 200.0;
  double energy = 100.0;
  double phase = 100.0;
  double discriminator = 4.0;  // carried for completeness; no adversarial term here

  /// Throws std::invalid_argument if any weight is negative or not finite.
  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct MultiResConfig {
  std::vector<StftConfig> freq_windows;
  std::vector<std::size_t> time_windows;
  StftConfig mel_stft{};
  MelConfig mel{};
  bool sc_conventional = false;  // divide by |S| instead of |S_hat|

  /// Seven STFT windows 64..4096 with hop = window / 4, and time window
  /// counts {1, 240, 480, 960}.
  static MultiResConfig defaults();
};

/// Splits x into w contiguous windows with boundaries floor(i * L / w) and
/// returns the mean of each. Throws unless 1 <= w <= len(x).
std::vector<double> window_mean(std::span<const double> x, std::size_t w);

/// RMS of the mel-spectrogram difference.
double mel_loss(const AudioBuffer& est, const AudioBuffer& ref,
                const StftConfig& stft = {}, const MelConfig& mel = {});

/// Frobenius norm of the magnitude difference divided by the norm of |S_hat|
/// (or of |S| when `conventional`). A silent denominator returns the cap.
double spectral_convergence(const AudioBuffer& est, const AudioBuffer& ref,
                            const StftConfig& stft, bool conventional = false);
double spectral_convergence(const Grid<double>& est, const Grid<double>& ref,
                            bool conventional = false);

/// Mean absolute difference of natural-log magnitudes, floored at 1e-8.
double magnitude_loss(const AudioBuffer& est, const AudioBuffer& ref,
                      const StftConfig& stft);
double magnitude_loss(const Grid<double>& est, const Grid<double>& ref);

/// Mean absolute differences of window_mean(x), window_mean(x^2) and the
/// first difference of window_mean(x^2).
double segment_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w);
double energy_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w);
double phase_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w);

struct FreqTerm {
  StftConfig stft;
  double sc = 0.0;
  double mag = 0.0;
};

struct TimeTerm {
  std::size_t window = 0;
  double seg = 0.0;
  double energy = 0.0;
  double phase = 0.0;
};

/// Unweighted components of every resolution.
struct LossBreakdown {
  double mel = 0.0;
  std::vector<FreqTerm> freq;
  std::vector<TimeTerm> time;
};

LossBreakdown loss_components(const AudioBuffer& est, const AudioBuffer& ref,
                              const MultiResConfig& cfg);

double frequency_loss(const LossBreakdown& parts, const LossWeights& w);
double time_loss(const LossBreakdown& parts, const LossWeights& w);

/// mel weight times the mel loss plus the weighted spectral terms of every
/// STFT resolution. Throws on an empty configuration.
double frequency_loss(const AudioBuffer& est, const AudioBuffer& ref,
                      const MultiResConfig& cfg, const LossWeights& w);

/// Weighted segment, energy and phase terms summed over the time
/// resolutions. Throws on an empty configuration.
double time_loss(const AudioBuffer& est, const AudioBuffer& ref,
                 const MultiResConfig& cfg, const LossWeights& w);

}  // namespace restorelab

#endif  // RESTORELAB_LOSSES_H_

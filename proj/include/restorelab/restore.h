// SPDX-License-Identifier: Apache-2.0
//
// Two-stage restoration with ground truth standing in for the analysis
// network: ideal ratio masks in the mel or linear domain, then a classical
// synthesis stage (non-negative mel inversion and Griffin-Lim).

#ifndef RESTORELAB_RESTORE_H_
#define RESTORELAB_RESTORE_H_

#include <cstdint>
#include <vector>

#include "restorelab/audio.h"
#include "restorelab/mel.h"
#include "restorelab/stft.h"

namespace restorelab {

inline constexpr double kDefaultMaskCeiling = 10.0;
inline constexpr double kMaskFloor = 1e-8;
inline constexpr int kDefaultNnlsIterations = 200;
inline constexpr int kDefaultGriffinLimIterations = 32;
/// restore_oracle never returns a peak above this multiple of the target peak.
inline constexpr double kRestorePeakGuard = 4.0;

/// clamp(target / max(input, 1e-8), 0, ceiling), elementwise.
Grid<double> oracle_mask(const Grid<double>& input, const Grid<double>& target,
                         double ceiling = kDefaultMaskCeiling);

MelSpectrogram oracle_mel_mask(const MelSpectrogram& x_mel, const MelSpectrogram& s_mel,
                               double ceiling = kDefaultMaskCeiling);
Grid<double> oracle_stft_mask(const MagnitudeSpectrogram& x, const MagnitudeSpectrogram& s,
                              double ceiling = kDefaultMaskCeiling);

MelSpectrogram apply_mel_mask(const MelSpectrogram& x_mel, const MelSpectrogram& mask);
Grid<double> apply_mask(const Grid<double>& x, const Grid<double>& mask);

struct NnlsOptions {
  int iterations = kDefaultNnlsIterations;
  int threads = 1;
};

/// Per frame, a non-negative x with x W close to the mel frame, found by
/// multiplicative updates started from the filterbank back-projection. Bins
/// outside every filter stay zero. The result carries the filterbank's FFT
/// size and `hop`.
MagnitudeSpectrogram mel_to_linear(const MelSpectrogram& mel, const MelFilterbank& fb,
                                   int hop, const NnlsOptions& opts = {});

enum class PhaseInit { kZero, kRandom };

struct GriffinLimOptions {
  int iterations = kDefaultGriffinLimIterations;
  PhaseInit init = PhaseInit::kZero;
  std::uint64_t seed = 0;
  std::size_t out_len = 0;  // 0: (frames - 1) * hop
  /// When non-null, receives iterations + 1 values: the spectral
  /// convergence of |stft(istft(X_n))| against the target magnitude for each
  /// magnitude-constrained estimate X_n.
  std::vector<double>* trace = nullptr;
};

AudioBuffer griffin_lim(const MagnitudeSpectrogram& mag, const GriffinLimOptions& opts = {});

struct RestoreConfig {
  StftConfig stft{};
  MelConfig mel{};
  double mask_ceiling = kDefaultMaskCeiling;
  NnlsOptions nnls{};
  GriffinLimOptions griffin_lim{};
};

struct OracleRestoreResult {
  AudioBuffer audio;
  MelSpectrogram target_mel;
  MelSpectrogram restored_mel;  // mask applied to the degraded mel
  bool peak_limited = false;
};

/// Mel of the degraded input, oracle mask from the target, mel inversion and
/// Griffin-Lim. Inputs at other rates are resampled to 44.1 kHz first; the
/// output matches the target length at 44.1 kHz.
OracleRestoreResult restore_oracle_detailed(const AudioBuffer& degraded,
                                            const AudioBuffer& target,
                                            const RestoreConfig& cfg = {});

AudioBuffer restore_oracle(const AudioBuffer& degraded, const AudioBuffer& target,
                           const RestoreConfig& cfg = {});

}  // namespace restorelab

#endif  // RESTORELAB_RESTORE_H_

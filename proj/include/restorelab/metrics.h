// SPDX-License-Identifier: Apache-2.0
//
// Objective metrics for restored speech: log-spectral distance, block SSIM
// on magnitude spectrograms, and scale-invariant SNR in the waveform and
// spectrogram domains.

#ifndef RESTORELAB_METRICS_H_
#define RESTORELAB_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "restorelab/audio.h"
#include "restorelab/stft.h"

namespace restorelab {

inline constexpr double kLsdFloor = 1e-8;
inline constexpr double kSnrCapDb = 100.0;
inline constexpr std::size_t kSsimBlock = 7;
inline constexpr double kSsimC1 = 0.01;
inline constexpr double kSsimC2 = 0.02;

/// Mean over frames of the per-frame RMS of log10(S^2 / S_hat^2). Magnitudes
/// are floored at `floor` first.
double lsd(const Grid<double>& ref, const Grid<double>& est,
           double floor = kLsdFloor);

/// SSIM of one block from population statistics.
double ssim_block(std::span<const double> x, std::span<const double> y);

/// Both grids are divided by the reference maximum, then SSIM is averaged
/// over non-overlapping 7x7 tiles. Tiles that would cross the grid edge are
/// dropped. Throws if the grid is smaller than one tile.
double ssim(const Grid<double>& ref, const Grid<double>& est);

struct SnrOptions {
  double cap_db = kSnrCapDb;
  /// Project with |est|^2 in the denominator instead of |ref|^2. This loses
  /// scale invariance and is off by default.
  bool strict_estimate_denominator = false;
};

/// SI-SNR of flat sequences, clamped to [-cap, cap]. Throws on a length
/// mismatch or a silent reference.
double si_snr(std::span<const double> ref, std::span<const double> est,
              const SnrOptions& opts = {});

double sisnr(const AudioBuffer& ref, const AudioBuffer& est,
             const SnrOptions& opts = {});

/// SI-SNR of the two grids after subtracting each grid's mean. Throws if the
/// reference is constant.
double sispnr(const Grid<double>& ref, const Grid<double>& est,
              const SnrOptions& opts = {});

struct MetricConfig {
  StftConfig stft{};
  double lsd_floor = kLsdFloor;
  SnrOptions snr{};

  friend bool operator==(const MetricConfig& a, const MetricConfig& b) {
    return a.stft.window_size == b.stft.window_size && a.stft.hop == b.stft.hop &&
           a.lsd_floor == b.lsd_floor && a.snr.cap_db == b.snr.cap_db &&
           a.snr.strict_estimate_denominator == b.snr.strict_estimate_denominator;
  }
};

struct EvalPair {
  std::string id;
  AudioBuffer target;
  AudioBuffer estimate;
};

struct MetricRow {
  std::string id;
  double lsd = 0.0;
  double ssim = 0.0;
  double sisnr_db = 0.0;
  double sispnr_db = 0.0;
  std::optional<std::string> error;  // set when the pair could not be scored
};

struct MetricMeans {
  double lsd = 0.0;
  double ssim = 0.0;
  double sisnr_db = 0.0;
  double sispnr_db = 0.0;
  std::size_t count = 0;
};

struct MetricReport {
  MetricConfig config;
  std::vector<MetricRow> rows;
  std::optional<MetricMeans> mean;  // over rows without an error; absent if none
};

MetricRow evaluate_pair(const EvalPair& pair, const MetricConfig& cfg = {});

/// Scores every pair; a failing pair becomes a flagged row and the batch
/// continues.
MetricReport evaluate(const std::vector<EvalPair>& pairs,
                      const MetricConfig& cfg = {}, int threads = 1);

/// Arithmetic means of the unflagged rows, accumulated in row order.
std::optional<MetricMeans> aggregate(const std::vector<MetricRow>& rows);

}  // namespace restorelab

#endif  // RESTORELAB_METRICS_H_

// SPDX-License-Identifier: Apache-2.0

#include "restorelab/losses.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace restorelab {

namespace {

void require_pair(const AudioBuffer& est, const AudioBuffer& ref, const char* what) {
  if (est.size() != ref.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(est.size()) + " vs " +
                                std::to_string(ref.size()) + ")");
  }
  if (est.sample_rate != ref.sample_rate) {
    throw std::invalid_argument(std::string(what) + ": sample rate mismatch");
  }
}

std::vector<double> squared(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
  return out;
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

std::vector<double> first_difference(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 1; i < v.size(); ++i) out.push_back(v[i] - v[i - 1]);
  return out;
}

std::vector<TimeTerm> time_terms(const AudioBuffer& est, const AudioBuffer& ref,
                                 const std::vector<std::size_t>& windows) {
  std::vector<TimeTerm> out;
  for (std::size_t w : windows) {
    out.push_back({w, segment_loss(est, ref, w), energy_loss(est, ref, w),
                   phase_loss(est, ref, w)});
  }
  return out;
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {mel, sc, mag, seg, energy, phase, discriminator}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("loss weights must be finite and non-negative");
    }
  }
}

MultiResConfig MultiResConfig::defaults() {
  MultiResConfig cfg;
  for (int w = 64; w <= 4096; w *= 2) cfg.freq_windows.push_back({w, w / 4});
  cfg.time_windows = {1, 240, 480, 960};
  return cfg;
}

std::vector<double> window_mean(std::span<const double> x, std::size_t w) {
  if (w == 0 || w > x.size()) {
    throw std::invalid_argument("window_mean: need 1 <= w <= length (w = " +
                                std::to_string(w) + ", length = " +
                                std::to_string(x.size()) + ")");
  }
  std::vector<double> out(w);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t begin = i * n / w;
    const std::size_t end = (i + 1) * n / w;
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) acc += x[k];
    out[i] = acc / static_cast<double>(end - begin);
  }
  return out;
}

double mel_loss(const AudioBuffer& est, const AudioBuffer& ref, const StftConfig& stft,
                const MelConfig& mel) {
  require_pair(est, ref, "mel_loss");
  const MelFilterbank fb = mel_filterbank(stft.window_size, ref.sample_rate, mel);
  const MelSpectrogram a = apply_mel(magnitude_spectrogram(est, stft), fb);
  const MelSpectrogram b = apply_mel(magnitude_spectrogram(ref, stft), fb);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    const double d = a.bins.data()[i] - b.bins.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.bins.size()));
}

double spectral_convergence(const Grid<double>& est, const Grid<double>& ref,
                            bool conventional) {
  require_same_shape(est, ref, "spectral_convergence");
  double diff = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est.data()[i] - ref.data()[i];
    const double m = conventional ? ref.data()[i] : est.data()[i];
    diff += d * d;
    denom += m * m;
  }
  if (!(denom > 0.0)) return diff > 0.0 ? kSpectralConvergenceCap : 0.0;
  return std::min(std::sqrt(diff / denom), kSpectralConvergenceCap);
}

double spectral_convergence(const AudioBuffer& est, const AudioBuffer& ref,
                            const StftConfig& stft, bool conventional) {
  require_pair(est, ref, "spectral_convergence");
  return spectral_convergence(magnitude_spectrogram(est, stft).bins,
                              magnitude_spectrogram(ref, stft).bins, conventional);
}

double magnitude_loss(const Grid<double>& est, const Grid<double>& ref) {
  require_same_shape(est, ref, "magnitude_loss");
  if (est.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    acc += std::abs(std::log(std::max(est.data()[i], kLossFloor)) -
                    std::log(std::max(ref.data()[i], kLossFloor)));
  }
  return acc / static_cast<double>(est.size());
}

double magnitude_loss(const AudioBuffer& est, const AudioBuffer& ref,
                      const StftConfig& stft) {
  require_pair(est, ref, "magnitude_loss");
  return magnitude_loss(magnitude_spectrogram(est, stft).bins,
                        magnitude_spectrogram(ref, stft).bins);
}

double segment_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w) {
  require_pair(est, ref, "segment_loss");
  return mean_abs_diff(window_mean(est.samples, w), window_mean(ref.samples, w));
}

double energy_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w) {
  require_pair(est, ref, "energy_loss");
  return mean_abs_diff(window_mean(squared(est.samples), w),
                       window_mean(squared(ref.samples), w));
}

double phase_loss(const AudioBuffer& est, const AudioBuffer& ref, std::size_t w) {
  require_pair(est, ref, "phase_loss");
  return mean_abs_diff(first_difference(window_mean(squared(est.samples), w)),
                       first_difference(window_mean(squared(ref.samples), w)));
}

LossBreakdown loss_components(const AudioBuffer& est, const AudioBuffer& ref,
                              const MultiResConfig& cfg) {
  require_pair(est, ref, "loss");
  LossBreakdown out;
  out.mel = mel_loss(est, ref, cfg.mel_stft, cfg.mel);
  for (const StftConfig& res : cfg.freq_windows) {
    const Grid<double> a = magnitude_spectrogram(est, res).bins;
    const Grid<double> b = magnitude_spectrogram(ref, res).bins;
    out.freq.push_back({res, spectral_convergence(a, b, cfg.sc_conventional),
                        magnitude_loss(a, b)});
  }
  out.time = time_terms(est, ref, cfg.time_windows);
  return out;
}

double frequency_loss(const LossBreakdown& parts, const LossWeights& w) {
  w.validate();
  double total = w.mel * parts.mel;
  for (const FreqTerm& t : parts.freq) total += w.sc * t.sc + w.mag * t.mag;
  return total;
}

double time_loss(const LossBreakdown& parts, const LossWeights& w) {
  w.validate();
  double total = 0.0;
  for (const TimeTerm& t : parts.time) {
    total += w.seg * t.seg + w.energy * t.energy + w.phase * t.phase;
  }
  return total;
}

double frequency_loss(const AudioBuffer& est, const AudioBuffer& ref,
                      const MultiResConfig& cfg, const LossWeights& w) {
  if (cfg.freq_windows.empty()) {
    throw std::invalid_argument("frequency_loss: no STFT resolutions configured");
  }
  MultiResConfig freq_only = cfg;
  freq_only.time_windows.clear();
  return frequency_loss(loss_components(est, ref, freq_only), w);
}

double time_loss(const AudioBuffer& est, const AudioBuffer& ref,
                 const MultiResConfig& cfg, const LossWeights& w) {
  if (cfg.time_windows.empty()) {
    throw std::invalid_argument("time_loss: no time resolutions configured");
  }
  require_pair(est, ref, "time_loss");
  LossBreakdown parts;
  parts.time = time_terms(est, ref, cfg.time_windows);
  return time_loss(parts, w);
}

}  // namespace restorelab

// SPDX-License-Identifier: Apache-2.0

#include "restorelab/restore.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "restorelab/parallel.h"
#include "restorelab/random.h"
#include "restorelab/resample.h"

namespace restorelab {

Grid<double> oracle_mask(const Grid<double>& input, const Grid<double>& target,
                         double ceiling) {
  require_same_shape(input, target, "oracle_mask");
  if (!(ceiling > 0.0)) throw std::invalid_argument("oracle_mask: ceiling must be positive");
  Grid<double> mask(input.rows(), input.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double r = target.data()[i] / std::max(input.data()[i], kMaskFloor);
    mask.data()[i] = std::clamp(r, 0.0, ceiling);
  }
  return mask;
}

MelSpectrogram oracle_mel_mask(const MelSpectrogram& x_mel, const MelSpectrogram& s_mel,
                               double ceiling) {
  return MelSpectrogram{oracle_mask(x_mel.bins, s_mel.bins, ceiling)};
}

Grid<double> oracle_stft_mask(const MagnitudeSpectrogram& x, const MagnitudeSpectrogram& s,
                              double ceiling) {
  return oracle_mask(x.bins, s.bins, ceiling);
}

Grid<double> apply_mask(const Grid<double>& x, const Grid<double>& mask) {
  require_same_shape(x, mask, "apply_mask");
  Grid<double> out(x.rows(), x.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = x.data()[i] * mask.data()[i];
  return out;
}

MelSpectrogram apply_mel_mask(const MelSpectrogram& x_mel, const MelSpectrogram& mask) {
  return MelSpectrogram{apply_mask(x_mel.bins, mask.bins)};
}

namespace {

// Nonzero span of one mel filter.
struct Band {
  std::size_t begin = 0;
  std::size_t end = 0;
};

}  // namespace

MagnitudeSpectrogram mel_to_linear(const MelSpectrogram& mel, const MelFilterbank& fb,
                                   int hop, const NnlsOptions& opts) {
  if (mel.mels() != fb.mels()) {
    throw std::invalid_argument("mel_to_linear: " + std::to_string(mel.mels()) +
                                " mel bands but the filterbank has " +
                                std::to_string(fb.mels()));
  }
  if (opts.iterations < 0) throw std::invalid_argument("mel_to_linear: negative iterations");
  const std::size_t F = fb.freqs();
  const std::size_t M = fb.mels();
  const Grid<double>& W = fb.weights;

  std::vector<Band> bands(M);
  std::vector<double> support(F, 0.0);    // row sums of W
  std::vector<double> band_gain(M, 0.0);  // column sums of W
  for (std::size_t m = 0; m < M; ++m) {
    Band b{F, 0};
    for (std::size_t f = 0; f < F; ++f) {
      if (W(f, m) != 0.0) {
        b.begin = std::min(b.begin, f);
        b.end = f + 1;
        support[f] += W(f, m);
        band_gain[m] += W(f, m);
      }
    }
    if (b.end == 0) b.begin = 0;
    bands[m] = b;
  }

  MagnitudeSpectrogram out;
  out.bins = Grid<double>(mel.frames(), F, 0.0);
  out.window_size = fb.n_fft;
  out.hop = hop;
  out.sample_rate = fb.sample_rate;

  parallel_for(mel.frames(), opts.threads, [&](std::size_t t) {
    const auto target = mel.bins.row(t);
    auto x = out.bins.row(t);
    // Start from each band's level spread flat across the band, averaged
    // over the bands covering a bin.
    for (std::size_t m = 0; m < M; ++m) {
      if (!(band_gain[m] > 0.0)) continue;
      const double level = std::max(target[m], 0.0) / band_gain[m];
      for (std::size_t f = bands[m].begin; f < bands[m].end; ++f) x[f] += W(f, m) * level;
    }
    for (std::size_t f = 0; f < F; ++f) x[f] = support[f] > 0.0 ? x[f] / support[f] : 0.0;

    std::vector<double> xw(M), numer(F), denom(F);
    for (int it = 0; it < opts.iterations; ++it) {
      for (std::size_t m = 0; m < M; ++m) {
        double acc = 0.0;
        for (std::size_t f = bands[m].begin; f < bands[m].end; ++f) acc += x[f] * W(f, m);
        xw[m] = acc;
      }
      std::fill(numer.begin(), numer.end(), 0.0);
      std::fill(denom.begin(), denom.end(), 0.0);
      for (std::size_t m = 0; m < M; ++m) {
        const double tm = std::max(target[m], 0.0);
        for (std::size_t f = bands[m].begin; f < bands[m].end; ++f) {
          numer[f] += tm * W(f, m);
          denom[f] += xw[m] * W(f, m);
        }
      }
      for (std::size_t f = 0; f < F; ++f) {
        if (denom[f] > 0.0) x[f] *= numer[f] / denom[f];
      }
    }
  });
  return out;
}

namespace {

double magnitude_misfit(const ComplexSpectrogram& spec, const MagnitudeSpectrogram& mag,
                        double mag_norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.bins.size(); ++i) {
    const double d = std::abs(spec.bins.data()[i]) - mag.bins.data()[i];
    acc += d * d;
  }
  return mag_norm > 0.0 ? std::sqrt(acc) / mag_norm : std::sqrt(acc);
}

}  // namespace

AudioBuffer griffin_lim(const MagnitudeSpectrogram& mag, const GriffinLimOptions& opts) {
  if (opts.iterations < 0) throw std::invalid_argument("griffin_lim: negative iterations");
  if (mag.window_size <= 0 || mag.hop <= 0 || mag.sample_rate <= 0) {
    throw std::invalid_argument("griffin_lim: magnitude lacks window, hop or sample rate");
  }
  const std::size_t out_len =
      opts.out_len > 0 ? opts.out_len
                       : (mag.frames() > 0 ? (mag.frames() - 1) * mag.hop : 0);

  ComplexSpectrogram x;
  x.bins = Grid<std::complex<double>>(mag.frames(), mag.freqs());
  x.window_size = mag.window_size;
  x.hop = mag.hop;
  x.sample_rate = mag.sample_rate;
  if (opts.init == PhaseInit::kZero) {
    for (std::size_t i = 0; i < x.bins.size(); ++i) x.bins.data()[i] = mag.bins.data()[i];
  } else {
    Rng rng(opts.seed);
    for (std::size_t i = 0; i < x.bins.size(); ++i) {
      x.bins.data()[i] =
          std::polar(mag.bins.data()[i], rng.uniform(-std::numbers::pi, std::numbers::pi));
    }
  }

  double mag_norm = 0.0;
  for (double v : mag.bins.data()) mag_norm += v * v;
  mag_norm = std::sqrt(mag_norm);
  if (opts.trace) opts.trace->clear();

  AudioBuffer y = istft(x, out_len);
  for (int it = 0;; ++it) {
    if (it == opts.iterations && !opts.trace) break;
    const ComplexSpectrogram consistent = stft(y, mag.window_size, mag.hop);
    if (opts.trace) opts.trace->push_back(magnitude_misfit(consistent, mag, mag_norm));
    if (it == opts.iterations) break;
    for (std::size_t i = 0; i < x.bins.size(); ++i) {
      const std::complex<double> c = consistent.bins.data()[i];
      const double a = std::abs(c);
      x.bins.data()[i] = a > 0.0 ? c * (mag.bins.data()[i] / a)
                                 : std::complex<double>(mag.bins.data()[i], 0.0);
    }
    y = istft(x, out_len);
  }
  return y;
}

OracleRestoreResult restore_oracle_detailed(const AudioBuffer& degraded,
                                            const AudioBuffer& target,
                                            const RestoreConfig& cfg) {
  if (degraded.empty() || target.empty()) {
    throw std::invalid_argument("restore_oracle: empty input");
  }
  const AudioBuffer x = degraded.sample_rate == kDefaultSampleRate
                            ? degraded
                            : resample(degraded, kDefaultSampleRate);
  AudioBuffer s = target.sample_rate == kDefaultSampleRate
                      ? target
                      : resample(target, kDefaultSampleRate);
  AudioBuffer xa = x;
  xa.samples.resize(s.size(), 0.0);

  const MelFilterbank fb = mel_filterbank(cfg.stft.window_size, kDefaultSampleRate, cfg.mel);
  OracleRestoreResult out;
  const MelSpectrogram x_mel = apply_mel(magnitude_spectrogram(xa, cfg.stft), fb);
  out.target_mel = apply_mel(magnitude_spectrogram(s, cfg.stft), fb);
  out.restored_mel =
      apply_mel_mask(x_mel, oracle_mel_mask(x_mel, out.target_mel, cfg.mask_ceiling));

  const MagnitudeSpectrogram lin = mel_to_linear(out.restored_mel, fb, cfg.stft.hop, cfg.nnls);
  GriffinLimOptions gl = cfg.griffin_lim;
  gl.out_len = s.size();
  out.audio = griffin_lim(lin, gl);

  double target_peak = 0.0, peak = 0.0;
  for (double v : s.samples) target_peak = std::max(target_peak, std::abs(v));
  for (double v : out.audio.samples) {
    if (!std::isfinite(v)) throw std::runtime_error("restore_oracle: non-finite output");
    peak = std::max(peak, std::abs(v));
  }
  const double limit = kRestorePeakGuard * target_peak;
  if (peak > limit) {
    const double g = limit / peak;
    for (double& v : out.audio.samples) v *= g;
    out.peak_limited = true;
  }
  return out;
}

AudioBuffer restore_oracle(const AudioBuffer& degraded, const AudioBuffer& target,
                           const RestoreConfig& cfg) {
  return restore_oracle_detailed(degraded, target, cfg).audio;
}

}  // namespace restorelab

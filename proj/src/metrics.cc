// SPDX-License-Identifier: Apache-2.0

#include "restorelab/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "restorelab/parallel.h"

namespace restorelab {

double lsd(const Grid<double>& ref, const Grid<double>& est, double floor) {
  require_same_shape(ref, est, "lsd");
  if (ref.empty()) throw std::invalid_argument("lsd: empty spectrogram");
  double total = 0.0;
  for (std::size_t t = 0; t < ref.rows(); ++t) {
    double acc = 0.0;
    for (std::size_t f = 0; f < ref.cols(); ++f) {
      const double a = std::max(ref(t, f), floor);
      const double b = std::max(est(t, f), floor);
      const double d = 2.0 * std::log10(a / b);
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(ref.cols()));
  }
  return total / static_cast<double>(ref.rows());
}

double ssim_block(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("ssim_block: blocks must be non-empty and equal in size");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cxy += dx * dy;
  }
  vx /= n;
  vy /= n;
  cxy /= n;
  return ((2.0 * mx * my + kSsimC1) * (2.0 * cxy + kSsimC2)) /
         ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
}

double ssim(const Grid<double>& ref, const Grid<double>& est) {
  require_same_shape(ref, est, "ssim");
  const std::size_t br = ref.rows() / kSsimBlock;
  const std::size_t bc = ref.cols() / kSsimBlock;
  if (br == 0 || bc == 0) {
    throw std::invalid_argument("ssim: grid smaller than one 7x7 block");
  }
  double peak = 0.0;
  for (double v : ref.data()) peak = std::max(peak, std::abs(v));
  const double norm = peak > 0.0 ? 1.0 / peak : 1.0;

  std::vector<double> x(kSsimBlock * kSsimBlock), y(kSsimBlock * kSsimBlock);
  double total = 0.0;
  for (std::size_t i = 0; i < br; ++i) {
    for (std::size_t j = 0; j < bc; ++j) {
      for (std::size_t a = 0; a < kSsimBlock; ++a) {
        for (std::size_t b = 0; b < kSsimBlock; ++b) {
          const std::size_t r = i * kSsimBlock + a;
          const std::size_t c = j * kSsimBlock + b;
          x[a * kSsimBlock + b] = ref(r, c) * norm;
          y[a * kSsimBlock + b] = est(r, c) * norm;
        }
      }
      total += ssim_block(x, y);
    }
  }
  return total / static_cast<double>(br * bc);
}

double si_snr(std::span<const double> ref, std::span<const double> est,
              const SnrOptions& opts) {
  if (ref.size() != est.size()) {
    throw std::invalid_argument("si_snr: length mismatch (" + std::to_string(ref.size()) +
                                " vs " + std::to_string(est.size()) + ")");
  }
  double dot = 0.0, rr = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    dot += ref[i] * est[i];
    rr += ref[i] * ref[i];
    ee += est[i] * est[i];
  }
  if (!(rr > 0.0)) throw std::invalid_argument("si_snr: silent reference");
  const double denom = opts.strict_estimate_denominator ? ee : rr;
  if (!(denom > 0.0)) return -opts.cap_db;
  const double alpha = dot / denom;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double st = alpha * ref[i];
    const double e = est[i] - st;
    target += st * st;
    noise += e * e;
  }
  if (!(noise > 0.0)) return target > 0.0 ? opts.cap_db : -opts.cap_db;
  if (!(target > 0.0)) return -opts.cap_db;
  const double db = 10.0 * std::log10(target / noise);
  return std::clamp(db, -opts.cap_db, opts.cap_db);
}

double sisnr(const AudioBuffer& ref, const AudioBuffer& est, const SnrOptions& opts) {
  return si_snr(ref.samples, est.samples, opts);
}

double sispnr(const Grid<double>& ref, const Grid<double>& est, const SnrOptions& opts) {
  require_same_shape(ref, est, "sispnr");
  if (ref.empty()) throw std::invalid_argument("sispnr: empty spectrogram");
  auto centred = [](const Grid<double>& g) {
    double m = 0.0;
    for (double v : g.data()) m += v;
    m /= static_cast<double>(g.size());
    std::vector<double> out(g.data());
    for (double& v : out) v -= m;
    return out;
  };
  const std::vector<double> a = centred(ref);
  const std::vector<double> b = centred(est);
  if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) {
    throw std::invalid_argument("sispnr: constant reference spectrogram");
  }
  return si_snr(a, b, opts);
}

MetricRow evaluate_pair(const EvalPair& pair, const MetricConfig& cfg) {
  MetricRow row;
  row.id = pair.id;
  if (pair.target.sample_rate != pair.estimate.sample_rate) {
    throw std::invalid_argument("evaluate: sample rate mismatch");
  }
  const auto s = magnitude_spectrogram(pair.target, cfg.stft);
  const auto e = magnitude_spectrogram(pair.estimate, cfg.stft);
  row.lsd = lsd(s.bins, e.bins, cfg.lsd_floor);
  row.ssim = ssim(s.bins, e.bins);
  row.sisnr_db = sisnr(pair.target, pair.estimate, cfg.snr);
  row.sispnr_db = sispnr(s.bins, e.bins, cfg.snr);
  return row;
}

std::optional<MetricMeans> aggregate(const std::vector<MetricRow>& rows) {
  MetricMeans m;
  for (const auto& r : rows) {
    if (r.error) continue;
    m.lsd += r.lsd;
    m.ssim += r.ssim;
    m.sisnr_db += r.sisnr_db;
    m.sispnr_db += r.sispnr_db;
    ++m.count;
  }
  if (m.count == 0) return std::nullopt;
  const double n = static_cast<double>(m.count);
  m.lsd /= n;
  m.ssim /= n;
  m.sisnr_db /= n;
  m.sispnr_db /= n;
  return m;
}

MetricReport evaluate(const std::vector<EvalPair>& pairs, const MetricConfig& cfg,
                      int threads) {
  MetricReport report;
  report.config = cfg;
  report.rows.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    try {
      if (pairs[i].target.size() != pairs[i].estimate.size()) {
        throw std::invalid_argument("length mismatch (" +
                                    std::to_string(pairs[i].target.size()) + " vs " +
                                    std::to_string(pairs[i].estimate.size()) + ")");
      }
      report.rows[i] = evaluate_pair(pairs[i], cfg);
    } catch (const std::exception& ex) {
      report.rows[i] = MetricRow{};
      report.rows[i].id = pairs[i].id;
      report.rows[i].error = ex.what();
    }
  });
  report.mean = aggregate(report.rows);
  return report;
}

}  // namespace restorelab

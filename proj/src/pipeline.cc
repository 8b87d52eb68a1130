// SPDX-License-Identifier: Apache-2.0

#include "restorelab/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "restorelab/distortions.h"
#include "restorelab/parallel.h"
#include "restorelab/random.h"
#include "restorelab/resample.h"

namespace restorelab {
namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("config: ") + name +
                                " must lie in [0, 1]");
  }
}

void require_range(const Range& r, const char* name) {
  if (!(std::isfinite(r.low) && std::isfinite(r.high) && r.low <= r.high)) {
    throw std::invalid_argument(std::string("config: ") + name +
                                " must be a finite range with low <= high");
  }
}

// Index in [0, n) from one uniform variate; n == 0 still consumes it.
std::size_t pick(Rng& rng, std::size_t n) {
  const double u = rng.uniform();
  if (n == 0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

const AudioBuffer& find_item(const Pool& pool, const std::string& id,
                             const char* what) {
  for (const auto& item : pool) {
    if (item.id == id) return item.audio;
  }
  throw std::invalid_argument(std::string("replay: unknown ") + what +
                              " id '" + id + "'");
}

void require_rate(const AudioBuffer& a, int rate, const char* what) {
  if (a.sample_rate != rate) {
    throw std::invalid_argument(std::string(what) + ": sample rate " +
                                std::to_string(a.sample_rate) +
                                " does not match speech rate " +
                                std::to_string(rate));
  }
}

AudioBuffer fit_length(AudioBuffer a, std::size_t n) {
  a.samples.resize(n, 0.0);
  return a;
}

}  // namespace

void DistortionConfig::validate() const {
  require_probability(p1, "p1");
  require_probability(p2, "p2");
  require_probability(p3, "p3");
  require_probability(p4, "p4");
  require_probability(p5, "p5");
  require_range(eta, "eta");
  if (eta.low < 0.0 || eta.high > 1.0) {
    throw std::invalid_argument("config: eta must lie within [0, 1]");
  }
  require_range(cutoff_hz, "cutoff_hz");
  if (cutoff_hz.low <= 0.0) {
    throw std::invalid_argument("config: cutoff_hz must be positive");
  }
  if (order.low > order.high || order.low < 1 || order.high > 24) {
    throw std::invalid_argument("config: order must be a range within [1, 24]");
  }
  require_range(snr_db, "snr_db");
  require_range(scale, "scale");
  if (families.empty()) {
    throw std::invalid_argument("config: at least one filter family is required");
  }
}

DistortionRecord sample_record(const DistortionConfig& cfg,
                               std::uint64_t master_seed, std::uint64_t index,
                               const Pool& noise_pool, const Pool& rir_pool,
                               int sample_rate) {
  cfg.validate();
  if (cfg.p1 > 0.0 && rir_pool.empty()) {
    throw std::invalid_argument("degrade: reverberation enabled but the RIR pool is empty");
  }
  if (cfg.p5 > 0.0 && noise_pool.empty()) {
    throw std::invalid_argument("degrade: noise enabled but the noise pool is empty");
  }

  DistortionRecord rec;
  rec.master_seed = master_seed;
  rec.index = index;
  rec.seed = derive_seed(master_seed, index);
  rec.trim_reverb = cfg.trim_reverb;
  Rng rng(rec.seed);

  // Fixed draw order; see the header.
  const std::size_t rir_idx = pick(rng, rir_pool.size());
  const std::size_t noise_idx = pick(rng, noise_pool.size());
  const std::size_t noise_offset =
      pick(rng, noise_pool.empty() ? 0 : noise_pool[noise_idx].audio.size());
  const bool do_reverb = rng.bernoulli(cfg.p1);
  const bool do_clip = rng.bernoulli(cfg.p2);
  const double eta = rng.uniform(cfg.eta.low, cfg.eta.high);
  const bool do_lowpass = rng.bernoulli(cfg.p3);
  const FilterFamily family = cfg.families[pick(rng, cfg.families.size())];
  const double cutoff = rng.uniform(cfg.cutoff_hz.low, cfg.cutoff_hz.high);
  const int order =
      cfg.order.low +
      static_cast<int>(pick(rng, static_cast<std::size_t>(cfg.order.high - cfg.order.low + 1)));
  const bool noise_lowpass = rng.bernoulli(cfg.p4);
  const bool do_noise = rng.bernoulli(cfg.p5);
  const double snr = rng.uniform(cfg.snr_db.low, cfg.snr_db.high);
  rec.q = rng.uniform(cfg.scale.low, cfg.scale.high);

  if (do_reverb) rec.steps.push_back(ReverbStep{rir_pool[rir_idx].id});
  if (do_clip) rec.steps.push_back(ClipStep{eta});
  if (do_lowpass) {
    const double max_cutoff = kMaxCutoffFraction * 0.5 * sample_rate;
    rec.steps.push_back(LowpassStep{family, std::min(cutoff, max_cutoff), order,
                                    noise_lowpass});
  }
  if (do_noise) {
    rec.steps.push_back(NoiseStep{noise_pool[noise_idx].id, noise_offset, snr});
  }
  return rec;
}

DegradeResult apply_record(const AudioBuffer& s, const Pool& noise_pool,
                           const Pool& rir_pool,
                           const DistortionRecord& record) {
  if (s.empty()) throw std::invalid_argument("degrade: empty speech buffer");
  validate(s, "speech");

  AudioBuffer x = s;
  const LowpassStep* lowpass = nullptr;
  for (const auto& step : record.steps) {
    if (const auto* r = std::get_if<ReverbStep>(&step)) {
      const AudioBuffer& rir = find_item(rir_pool, r->rir_id, "rir");
      require_rate(rir, s.sample_rate, "rir");
      x = reverberate(x, rir);
      if (record.trim_reverb) x.samples.resize(s.size());
    } else if (const auto* c = std::get_if<ClipStep>(&step)) {
      x = clip(x, c->eta);
    } else if (const auto* l = std::get_if<LowpassStep>(&step)) {
      x = lowpass_resample(x, {l->family, l->cutoff_hz, l->order});
      lowpass = l;
    } else if (const auto* n = std::get_if<NoiseStep>(&step)) {
      const AudioBuffer& noise = find_item(noise_pool, n->noise_id, "noise");
      require_rate(noise, s.sample_rate, "noise");
      AudioBuffer segment = tile_noise(noise, n->offset, x.size());
      if (lowpass != nullptr && lowpass->noise_lowpass) {
        segment = lowpass_resample(
            segment, {lowpass->family, lowpass->cutoff_hz, lowpass->order});
      }
      x = add_noise(x, segment, n->snr_db);
    }
  }

  DegradeResult out;
  out.target = fit_length(scale(s, record.q), x.size());
  out.degraded = scale(x, record.q);
  out.record = record;
  return out;
}

DegradeResult degrade(const AudioBuffer& s, const Pool& noise_pool,
                      const Pool& rir_pool, const DistortionConfig& cfg,
                      std::uint64_t master_seed, std::uint64_t index) {
  const DistortionRecord rec =
      sample_record(cfg, master_seed, index, noise_pool, rir_pool, s.sample_rate);
  return apply_record(s, noise_pool, rir_pool, rec);
}

AudioBuffer replay(const AudioBuffer& s, const Pool& noise_pool,
                   const Pool& rir_pool, const DistortionRecord& record) {
  return apply_record(s, noise_pool, rir_pool, record).degraded;
}

// ---------------------------------------------------------------------------

namespace {

void require_corpus_rate(const Pool& corpus, int rate, const char* what) {
  for (const auto& item : corpus) {
    if (item.audio.sample_rate != rate) {
      throw std::invalid_argument(std::string(what) + ": '" + item.id +
                                  "' is not at " + std::to_string(rate) + " Hz");
    }
  }
}

}  // namespace

PairedSet build_sr_testset(const Pool& corpus, int u, int threads) {
  require_corpus_rate(corpus, kDefaultSampleRate, "sr testset");
  if (u <= 0 || u > kDefaultSampleRate) {
    throw std::invalid_argument("sr testset: u must lie in (0, 44100]");
  }
  PairedSet set;
  set.name = "sr-" + std::to_string(u);
  set.items.resize(corpus.size());
  std::optional<IirFilter> lp;
  if (u < kDefaultSampleRate) {
    lp = design_lowpass(FilterFamily::kChebyshev1, u / 2.0, kSrFilterOrder,
                        kDefaultSampleRate);
  }
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const AudioBuffer& s = corpus[i].audio;
    PairedItem& item = set.items[i];
    item.id = corpus[i].id;
    item.target = s;
    if (!lp) {
      item.degraded = s;
      return;
    }
    const AudioBuffer low = resample(filter(s, *lp), u);
    item.degraded = fit_length(resample(low, s.sample_rate), s.size());
  });
  return set;
}

PairedSet build_declip_testset(const Pool& corpus, double eta, int threads) {
  PairedSet set;
  char name[32];
  std::snprintf(name, sizeof(name), "declip-%.2f", eta);
  set.name = name;
  set.items.resize(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    PairedItem& item = set.items[i];
    item.id = corpus[i].id;
    item.target = corpus[i].audio;
    item.degraded = clip(corpus[i].audio, eta);
  });
  return set;
}

PairedSet build_dereverb_testset(const Pool& corpus, const Pool& rir_pool,
                                 std::uint64_t seed, int threads) {
  if (rir_pool.empty()) throw std::invalid_argument("dereverb testset: empty RIR pool");
  PairedSet set;
  set.name = "dereverb";
  set.items.resize(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    DistortionRecord rec;
    rec.master_seed = seed;
    rec.index = i;
    rec.seed = derive_seed(seed, i);
    Rng rng(rec.seed);
    rec.steps.push_back(ReverbStep{rir_pool[pick(rng, rir_pool.size())].id});
    DegradeResult r = apply_record(corpus[i].audio, {}, rir_pool, rec);
    PairedItem& item = set.items[i];
    item.id = corpus[i].id;
    item.target = std::move(r.target);
    item.degraded = std::move(r.degraded);
    item.record = std::move(rec);
  });
  return set;
}

Pool segment_corpus(const Pool& corpus, double segment_seconds) {
  if (!(segment_seconds > 0.0)) {
    throw std::invalid_argument("segment_corpus: segment length must be positive");
  }
  Pool out;
  for (const auto& item : corpus) {
    const auto seg = static_cast<std::size_t>(
        std::lround(segment_seconds * item.audio.sample_rate));
    const std::size_t count = std::max<std::size_t>(1, item.audio.size() / seg);
    for (std::size_t k = 0; k < count; ++k) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_s%03zu", k);
      std::vector<double> samples(seg, 0.0);
      const std::size_t begin = k * seg;
      const std::size_t end = std::min(item.audio.size(), begin + seg);
      std::copy(item.audio.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                item.audio.samples.begin() + static_cast<std::ptrdiff_t>(end),
                samples.begin());
      out.push_back({item.id + suffix, AudioBuffer(std::move(samples), item.audio.sample_rate)});
    }
  }
  return out;
}

PairedSet build_gsr_testset(const Pool& corpus, const Pool& noise_pool,
                            const Pool& rir_pool, const DistortionConfig& cfg,
                            std::uint64_t seed, int threads,
                            double segment_seconds) {
  const Pool segments = segment_corpus(corpus, segment_seconds);
  PairedSet set;
  set.name = "gsr";
  set.items.resize(segments.size());
  parallel_for(segments.size(), threads, [&](std::size_t i) {
    DegradeResult r = degrade(segments[i].audio, noise_pool, rir_pool, cfg, seed, i);
    PairedItem& item = set.items[i];
    item.id = segments[i].id;
    item.target = std::move(r.target);
    item.degraded = std::move(r.degraded);
    item.record = std::move(r.record);
  });
  return set;
}

}  // namespace restorelab

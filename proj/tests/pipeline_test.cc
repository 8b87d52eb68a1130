// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "restorelab/distortions.h"
#include "restorelab/pipeline.h"
#include "support/oracles.h"
#include "support/synth.h"

using namespace restorelab;

namespace {

constexpr int kRate = 44100;

Pool noise_pool() {
  return {{"hiss", AudioBuffer(oracle::white_noise(30000, 101, 0.3), kRate)},
          {"hum", AudioBuffer(oracle::sine(120.0, kRate, 17000, 0.2), kRate)}};
}

Pool rir_pool() {
  std::vector<double> a(2000, 0.0), b(900, 0.0);
  a[0] = 1.0;
  for (std::size_t i = 1; i < a.size(); ++i) a[i] = 0.3 * std::exp(-0.004 * i) * std::sin(0.37 * i);
  b[40] = 0.8;
  b[400] = 0.2;
  return {{"hall", AudioBuffer(a, kRate)}, {"slap", AudioBuffer(b, kRate)}};
}

AudioBuffer utterance(std::uint64_t seed, double seconds = 0.5) {
  return AudioBuffer(synth::speech(static_cast<std::size_t>(seconds * kRate), kRate, seed), kRate);
}

DistortionConfig nothing() {
  DistortionConfig c;
  c.p1 = c.p2 = c.p3 = c.p4 = c.p5 = 0.0;
  c.scale = {1.0, 1.0};
  return c;
}

double peak(const AudioBuffer& x) {
  double p = 0.0;
  for (double v : x.samples) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace

TEST_CASE("all branches off and unit scale leaves speech untouched") {
  const AudioBuffer s = utterance(1);
  const auto r = degrade(s, {}, {}, nothing(), 5);
  CHECK(r.degraded == s);
  CHECK(r.target == s);
  CHECK(r.record.steps.empty());
}

TEST_CASE("same seed gives identical outputs and records") {
  const AudioBuffer s = utterance(2);
  const DistortionConfig cfg;
  for (std::uint64_t idx = 0; idx < 12; ++idx) {
    const auto a = degrade(s, noise_pool(), rir_pool(), cfg, 7, idx);
    const auto b = degrade(s, noise_pool(), rir_pool(), cfg, 7, idx);
    CHECK(a.record == b.record);
    CHECK(a.degraded == b.degraded);
    CHECK(a.target == b.target);
    CHECK(a.degraded.size() == a.target.size());
    CHECK(replay(s, noise_pool(), rir_pool(), a.record) == a.degraded);
  }
}

TEST_CASE("forced clipping reaches eta and is recorded") {
  DistortionConfig cfg = nothing();
  cfg.p2 = 1.0;
  cfg.eta = {0.1, 0.1};
  const AudioBuffer s = utterance(3);
  const auto r = degrade(s, {}, {}, cfg, 9);
  CHECK(peak(r.degraded) == 0.1);
  REQUIRE(r.record.steps.size() == 1);
  CHECK(std::get<ClipStep>(r.record.steps[0]).eta == 0.1);
}

TEST_CASE("scaling applies to both target and degraded") {
  DistortionConfig cfg = nothing();
  cfg.scale = {0.3, 0.3};
  const AudioBuffer s = utterance(4);
  const auto r = degrade(s, {}, {}, cfg, 1);
  CHECK(r.record.q == 0.3);
  CHECK(r.target == scale(s, 0.3));
  CHECK(r.degraded == scale(s, 0.3));
}

TEST_CASE("replay handles empty and tampered records") {
  const AudioBuffer s = utterance(5);
  DistortionRecord rec;
  rec.q = 0.5;
  CHECK(replay(s, {}, {}, rec) == scale(s, 0.5));

  rec.steps.push_back(ReverbStep{"cathedral"});
  CHECK_THROWS_AS(replay(s, noise_pool(), rir_pool(), rec), std::invalid_argument);
  rec.steps = {NoiseStep{"traffic", 0, 10.0}};
  CHECK_THROWS_AS(replay(s, noise_pool(), rir_pool(), rec), std::invalid_argument);
}

TEST_CASE("empty pools are rejected when their branch can fire") {
  const AudioBuffer s = utterance(6);
  DistortionConfig cfg = nothing();
  cfg.p1 = 0.1;
  CHECK_THROWS_AS(degrade(s, noise_pool(), {}, cfg, 1), std::invalid_argument);
  cfg = nothing();
  cfg.p5 = 0.1;
  CHECK_THROWS_AS(degrade(s, {}, rir_pool(), cfg, 1), std::invalid_argument);
}

TEST_CASE("config validation") {
  DistortionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.p3 = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DistortionConfig{};
  cfg.snr_db = {10.0, -5.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DistortionConfig{};
  cfg.families.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DistortionConfig{};
  cfg.eta = {0.5, 1.2};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("branch rates stay within three binomial sigmas") {
  const DistortionConfig cfg;
  const Pool noise = noise_pool(), rirs = rir_pool();
  const int n = 10000;
  int reverb = 0, clipped = 0, lowpass = 0, noise_lp = 0, noisy = 0;
  for (int i = 0; i < n; ++i) {
    const auto rec = sample_record(cfg, 7, i, noise, rirs);
    for (const auto& step : rec.steps) {
      reverb += std::holds_alternative<ReverbStep>(step);
      clipped += std::holds_alternative<ClipStep>(step);
      noisy += std::holds_alternative<NoiseStep>(step);
      if (const auto* l = std::get_if<LowpassStep>(&step)) {
        ++lowpass;
        noise_lp += l->noise_lowpass;
      }
    }
  }
  auto within = [](int hits, int trials, double p) {
    const double sigma = std::sqrt(trials * p * (1.0 - p));
    return std::abs(hits - trials * p) <= 3.0 * sigma;
  };
  CHECK(within(reverb, n, cfg.p1));
  CHECK(within(clipped, n, cfg.p2));
  CHECK(within(lowpass, n, cfg.p3));
  CHECK(within(noise_lp, lowpass, cfg.p4));
  CHECK(within(noisy, n, cfg.p5));
}

TEST_CASE("sampled parameters stay inside their ranges") {
  DistortionConfig cfg;
  cfg.p1 = cfg.p2 = cfg.p3 = cfg.p5 = 1.0;
  const Pool noise = noise_pool(), rirs = rir_pool();
  const double max_cutoff = kMaxCutoffFraction * kRate / 2.0;
  int families_seen[4] = {0, 0, 0, 0};
  int orders_seen[11] = {};
  for (int i = 0; i < 10000; ++i) {
    const auto rec = sample_record(cfg, 3, i, noise, rirs);
    CHECK(rec.q >= cfg.scale.low);
    CHECK(rec.q <= cfg.scale.high);
    for (const auto& step : rec.steps) {
      if (const auto* c = std::get_if<ClipStep>(&step)) {
        CHECK(c->eta >= cfg.eta.low);
        CHECK(c->eta <= cfg.eta.high);
      } else if (const auto* l = std::get_if<LowpassStep>(&step)) {
        CHECK(l->cutoff_hz >= cfg.cutoff_hz.low);
        CHECK(l->cutoff_hz <= max_cutoff);
        CHECK(l->order >= cfg.order.low);
        CHECK(l->order <= cfg.order.high);
        ++families_seen[static_cast<int>(l->family)];
        ++orders_seen[l->order];
      } else if (const auto* n = std::get_if<NoiseStep>(&step)) {
        CHECK(n->snr_db >= cfg.snr_db.low);
        CHECK(n->snr_db <= cfg.snr_db.high);
        const auto& item = n->noise_id == "hiss" ? noise[0] : noise[1];
        CHECK(n->offset < item.audio.size());
      }
    }
  }
  for (int f : families_seen) CHECK(f > 2000);
  for (int o = 2; o <= 10; ++o) CHECK(orders_seen[o] > 800);
}

TEST_CASE("noise lowpass branch filters the added noise") {
  DistortionConfig cfg = nothing();
  cfg.p3 = cfg.p4 = cfg.p5 = 1.0;
  cfg.cutoff_hz = {3000.0, 3000.0};
  cfg.snr_db = {0.0, 0.0};
  cfg.families = {FilterFamily::kButterworth};
  const Pool noise = {{"white", AudioBuffer(oracle::white_noise(1 << 15, 4, 0.5), kRate)}};
  const AudioBuffer s = utterance(8, 0.7);
  const auto r = degrade(s, noise, {}, cfg, 2);
  const double pass = oracle::band_energy(r.degraded.samples, kRate, 0.0, 3000.0);
  const double stop = oracle::band_energy(r.degraded.samples, kRate, 4000.0, 22050.0);
  CHECK(10.0 * std::log10(stop / pass) <= -50.0);

  cfg.p4 = 0.0;
  const auto wide = degrade(s, noise, {}, cfg, 2);
  const double stop_wide = oracle::band_energy(wide.degraded.samples, kRate, 4000.0, 22050.0);
  CHECK(stop_wide > 1e3 * stop);
}

TEST_CASE("untrimmed reverb pads the target to the same length") {
  DistortionConfig cfg = nothing();
  cfg.p1 = 1.0;
  cfg.trim_reverb = false;
  const AudioBuffer s = utterance(9);
  const auto r = degrade(s, noise_pool(), rir_pool(), cfg, 4);
  CHECK(r.degraded.size() > s.size());
  CHECK(r.target.size() == r.degraded.size());
  cfg.trim_reverb = true;
  CHECK(degrade(s, noise_pool(), rir_pool(), cfg, 4).degraded.size() == s.size());
}

TEST_CASE("sr testset removes content above u/2") {
  const Pool corpus = {{"wn", AudioBuffer(oracle::white_noise(1 << 16, 12, 0.5), kRate)},
                       {"sp", utterance(10, 1.0)}};
  const auto set = build_sr_testset(corpus, 8000);
  REQUIRE(set.items.size() == 2);
  for (const auto& item : set.items) {
    CAPTURE(item.id);
    CHECK(item.degraded.size() == item.target.size());
    const double total = oracle::band_energy(item.degraded.samples, kRate, 0.0, 22050.0);
    const double high = oracle::band_energy(item.degraded.samples, kRate, 4500.0, 22050.0);
    CHECK(10.0 * std::log10(high / total) <= -50.0);
  }
  const auto pass = build_sr_testset(corpus, 44100);
  CHECK(pass.items[1].degraded == corpus[1].audio);
  CHECK_THROWS_AS(build_sr_testset(corpus, 48000), std::invalid_argument);
  CHECK(std::vector<int>(std::begin(kSrTestRates), std::end(kSrTestRates)) ==
        std::vector<int>{2000, 4000, 8000, 16000, 24000});
  for (int u : kSrTestRates) CHECK_NOTHROW(build_sr_testset({corpus[1]}, u));
}

TEST_CASE("declip and dereverb testsets") {
  const Pool corpus = {{"a", utterance(11)}, {"b", utterance(12)}};
  for (const auto& item : build_declip_testset(corpus, 0.25).items) {
    CHECK(peak(item.degraded) <= 0.25);
  }
  const Pool delta = {{"delta", AudioBuffer({1.0}, kRate)}};
  for (const auto& item : build_dereverb_testset(corpus, delta, 3).items) {
    CHECK(item.degraded == item.target);
    REQUIRE(item.record.has_value());
    CHECK(std::get<ReverbStep>(item.record->steps[0]).rir_id == "delta");
  }
}

TEST_CASE("gsr testset is deterministic across runs and thread counts") {
  const Pool corpus = {{"long", utterance(13, 7.2)}, {"short", utterance(14, 1.0)}};
  const Pool segs = segment_corpus(corpus, 3.0);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].id == "long_s000");
  CHECK(segs[2].id == "short_s000");
  for (const auto& s : segs) CHECK(s.audio.size() == 3 * kRate);

  const DistortionConfig cfg;
  const auto a = build_gsr_testset(corpus, noise_pool(), rir_pool(), cfg, 21, 1);
  const auto b = build_gsr_testset(corpus, noise_pool(), rir_pool(), cfg, 21, 4);
  REQUIRE(a.items.size() == b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].degraded == b.items[i].degraded);
    CHECK(a.items[i].target == b.items[i].target);
    CHECK(a.items[i].record == b.items[i].record);
  }
}

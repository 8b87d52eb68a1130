// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "restorelab/metrics.h"
#include "support/metric_oracles.h"
#include "support/oracles.h"
#include "support/synth.h"

using namespace restorelab;

namespace {

Grid<double> random_grid(std::size_t r, std::size_t c, std::mt19937_64& rng,
                         double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Grid<double> g(r, c);
  for (double& v : g.data()) v = d(rng);
  return g;
}

using oracle::block_oracle;
using oracle::lsd_oracle;
using oracle::sisnr_oracle;
using oracle::ssim_oracle;

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("lsd examples") {
  std::mt19937_64 rng(1);
  const Grid<double> s = random_grid(5, 9, rng, 0.1, 2.0);
  CHECK(lsd(s, s) == 0.0);
  Grid<double> big = s;
  for (double& v : big.data()) v *= 10.0;
  CHECK(lsd(big, s) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(lsd(s, Grid<double>(5, 8)), std::invalid_argument);
}

TEST_CASE("lsd matches the double-loop oracle and is symmetric") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    Grid<double> a = random_grid(4, 4, rng);
    const Grid<double> b = random_grid(4, 4, rng);
    if (k % 10 == 0) a(1, 2) = 0.0;  // exercise the floor
    CHECK(std::abs(lsd(a, b) - lsd_oracle(a, b)) <= 1e-12);
    CHECK(std::abs(lsd(a, b) - lsd(b, a)) <= 1e-12);
  }
}

TEST_CASE("ssim examples") {
  std::mt19937_64 rng(3);
  const Grid<double> s = random_grid(21, 14, rng);
  CHECK(ssim(s, s) == doctest::Approx(1.0).epsilon(1e-9));

  Grid<double> inv = s;
  double peak = *std::max_element(s.data().begin(), s.data().end());
  Grid<double> unit = s;
  for (double& v : unit.data()) v /= peak;
  for (std::size_t i = 0; i < inv.size(); ++i) inv.data()[i] = 1.0 - unit.data()[i];
  const double anti = ssim(unit, inv);
  CHECK(anti < 0.5);
  CHECK(std::abs(anti - ssim_oracle(unit, inv)) <= 1e-12);

  CHECK_THROWS_AS(ssim(Grid<double>(6, 20, 1.0), Grid<double>(6, 20, 1.0)),
                  std::invalid_argument);
  const Grid<double> flat(7, 7, 0.4);
  CHECK(ssim(flat, flat) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single ssim block matches hand statistics") {
  std::mt19937_64 rng(4);
  const Grid<double> a = random_grid(7, 7, rng);
  const Grid<double> b = random_grid(7, 7, rng);
  CHECK(std::abs(ssim_block(a.data(), b.data()) - block_oracle(a, b, 0, 0, 1.0)) <= 1e-12);
}

TEST_CASE("ssim matches the oracle on random grids and stays in range") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::size_t r = 7 + rng() % 20, c = 7 + rng() % 20;
    const Grid<double> a = random_grid(r, c, rng);
    const Grid<double> b = random_grid(r, c, rng, 0.0, 3.0);
    const double v = ssim(a, b);
    CHECK(std::abs(v - ssim_oracle(a, b)) <= 1e-10);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("sisnr examples") {
  const std::vector<double> s = oracle::sine(440.0, 16000, 4000, 0.5);
  for (double a : {1.0, 0.5, 3.0, -2.0}) {
    std::vector<double> e = s;
    for (double& v : e) v *= a;
    CHECK(si_snr(s, e) == kSnrCapDb);
  }

  // Constant reference and an alternating-sign perturbation are orthogonal.
  std::vector<double> ref(1000, 0.3), est(1000);
  const double amp = 0.3 / std::sqrt(10.0);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] = ref[i] + (i % 2 ? amp : -amp);
  CHECK(si_snr(ref, est) == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(si_snr(ref, std::vector<double>(999)), std::invalid_argument);
  CHECK_THROWS_AS(si_snr(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)),
                  std::invalid_argument);
  CHECK(si_snr(ref, std::vector<double>(1000, 0.0)) == -kSnrCapDb);
}

TEST_CASE("sisnr matches the projection oracle and is scale invariant") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + rng() % 40;
    const auto s = random_vec(n, rng);
    auto e = random_vec(n, rng);
    for (std::size_t i = 0; i < n; ++i) e[i] += 2.0 * s[i];
    const double v = si_snr(s, e);
    CHECK(std::abs(v - sisnr_oracle(s, e)) <= 1e-10);
    for (double a : {0.5, 2.0, -1.0}) {
      auto scaled = e;
      for (double& x : scaled) x *= a;
      CHECK(std::abs(si_snr(s, scaled) - v) < 1e-9);
    }
  }
}

TEST_CASE("strict estimate denominator loses scale invariance") {
  const std::vector<double> s = oracle::sine(300.0, 8000, 800, 1.0);
  std::vector<double> e = s;
  for (double& v : e) v *= 2.0;
  SnrOptions strict;
  strict.strict_estimate_denominator = true;
  CHECK(si_snr(s, e, strict) == doctest::Approx(10.0 * std::log10(0.25 / 2.25)).epsilon(1e-12));
  CHECK(si_snr(s, s, strict) == kSnrCapDb);
}

TEST_CASE("sispnr examples and oracle") {
  std::mt19937_64 rng(7);
  const Grid<double> s = random_grid(8, 8, rng);
  CHECK(sispnr(s, s) == kSnrCapDb);
  Grid<double> shifted = s;
  for (double& v : shifted.data()) v += 3.7;
  CHECK(sispnr(s, shifted) == kSnrCapDb);
  CHECK_THROWS_AS(sispnr(Grid<double>(8, 8, 2.0), s), std::invalid_argument);

  for (int k = 0; k < 100; ++k) {
    const Grid<double> a = random_grid(8, 8, rng);
    Grid<double> b = random_grid(8, 8, rng);
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] += a.data()[i];
    std::vector<double> fa(a.data()), fb(b.data());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
      ma += fa[i] / fa.size();
      mb += fb[i] / fb.size();
    }
    for (double& v : fa) v -= ma;
    for (double& v : fb) v -= mb;
    CHECK(std::abs(sispnr(a, b) - sisnr_oracle(fa, fb)) <= 1e-10);
    Grid<double> c = b;
    for (double& v : c.data()) v -= 1.25;
    CHECK(std::abs(sispnr(a, c) - sispnr(a, b)) <= 1e-9);
  }
}

TEST_CASE("evaluate identical, empty and permuted batches") {
  const int rate = 16000;
  std::vector<EvalPair> pairs;
  for (int i = 0; i < 4; ++i) {
    AudioBuffer s(synth::speech(12000, rate, 30 + i), rate);
    pairs.push_back({"u" + std::to_string(i), s, s});
  }
  const MetricReport same = evaluate(pairs);
  REQUIRE(same.mean.has_value());
  CHECK(same.mean->lsd == 0.0);
  CHECK(same.mean->ssim == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(same.mean->sisnr_db == kSnrCapDb);
  CHECK(same.mean->sispnr_db == kSnrCapDb);

  const MetricReport empty = evaluate({});
  CHECK(empty.rows.empty());
  CHECK_FALSE(empty.mean.has_value());

  for (auto& p : pairs) {
    for (std::size_t i = 0; i < p.estimate.size(); i += 3) p.estimate.samples[i] *= 0.7;
  }
  const MetricReport fwd = evaluate(pairs, {}, 3);
  std::reverse(pairs.begin(), pairs.end());
  const MetricReport rev = evaluate(pairs);
  CHECK(fwd.mean->lsd == doctest::Approx(rev.mean->lsd).epsilon(1e-12));
  CHECK(fwd.mean->ssim == doctest::Approx(rev.mean->ssim).epsilon(1e-12));
  CHECK(fwd.mean->sisnr_db == doctest::Approx(rev.mean->sisnr_db).epsilon(1e-12));
  CHECK(fwd.mean->sispnr_db == doctest::Approx(rev.mean->sispnr_db).epsilon(1e-12));
  CHECK(fwd.rows[0].lsd == rev.rows[3].lsd);
}

TEST_CASE("a bad pair is flagged without aborting the batch") {
  const int rate = 16000;
  AudioBuffer s(synth::speech(8000, rate, 40), rate);
  std::vector<EvalPair> pairs = {{"good", s, s},
                                 {"short", s, AudioBuffer(std::vector<double>(100), rate)},
                                 {"silent", AudioBuffer(std::vector<double>(8000), rate), s}};
  const MetricReport r = evaluate(pairs);
  CHECK_FALSE(r.rows[0].error.has_value());
  CHECK(r.rows[1].error.has_value());
  CHECK(r.rows[2].error.has_value());
  REQUIRE(r.mean.has_value());
  CHECK(r.mean->count == 1);
  CHECK(r.mean->lsd == 0.0);
}

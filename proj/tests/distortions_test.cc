// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "restorelab/distortions.h"
#include "restorelab/random.h"
#include "support/oracles.h"

using namespace restorelab;

namespace {

constexpr int kRate = 44100;

double mean_abs_diff(const AudioBuffer& a, const AudioBuffer& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.samples[i] - b.samples[i]);
  return acc / static_cast<double>(a.size());
}

double peak(const AudioBuffer& x) {
  double p = 0.0;
  for (double v : x.samples) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace

TEST_CASE("clip hard-limits to eta") {
  const AudioBuffer x({0.5, -0.8, 0.05}, kRate);
  CHECK(clip(x, 0.1).samples == std::vector<double>{0.1, -0.1, 0.05});

  const AudioBuffer noise(oracle::white_noise(5000, 1, 1.0), kRate);
  CHECK(clip(noise, 1.0) == noise);
  for (double eta : {0.25, 0.1, 0.0, 0.06, 0.9}) {
    const auto y = clip(noise, eta);
    CHECK(peak(y) <= eta);
    CHECK(clip(y, eta) == y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK(std::abs(y.samples[i]) <= std::abs(noise.samples[i]));
      if (std::abs(noise.samples[i]) <= eta) CHECK(y.samples[i] == noise.samples[i]);
    }
  }
  CHECK_THROWS_AS(clip(x, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(clip(x, -0.1), std::invalid_argument);
}

TEST_CASE("reverberate with impulses") {
  const AudioBuffer x(oracle::white_noise(3000, 2), kRate);
  const auto y = reverberate(x, AudioBuffer({1.0}, kRate));
  REQUIRE(y.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y.samples[i] - x.samples[i]) <= 1e-12);

  std::vector<double> rir(101, 0.0);
  rir[100] = 0.5;
  const auto z = reverberate(x, AudioBuffer(rir, kRate));
  CHECK(z.size() == x.size() + 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(std::abs(z.samples[i]) <= 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(z.samples[i + 100] - 0.5 * x.samples[i]) <= 1e-12);
  }
  CHECK_THROWS_AS(reverberate(x, AudioBuffer({1.0}, 16000)), std::invalid_argument);
}

TEST_CASE("reverberated white noise energy scales by the rir energy") {
  const auto x = oracle::white_noise(1 << 17, 3);
  const auto rir = oracle::white_noise(300, 4, 0.2);
  const auto y = reverberate(AudioBuffer(x, kRate), AudioBuffer(rir, kRate));
  const double ratio = oracle::energy(y.samples) / (oracle::energy(x) * oracle::energy(rir));
  CHECK(std::abs(ratio - 1.0) <= 0.05);
}

TEST_CASE("lowpass_resample removes content above the cutoff") {
  const AudioBuffer x(oracle::white_noise(1 << 16, 5), kRate);
  for (FilterFamily fam : kAllFilterFamilies) {
    CAPTURE(to_string(fam));
    const auto y = lowpass_resample(x, {fam, 4000.0, 2});
    CHECK(y.size() == x.size());
    const double pass = oracle::band_energy(y.samples, kRate, 0.0, 4000.0);
    const double stop = oracle::band_energy(y.samples, kRate, 5000.0, 22050.0);
    CHECK(10.0 * std::log10(stop / pass) <= -50.0);
  }
}

TEST_CASE("lowpass_resample near Nyquist is close to identity in band") {
  const AudioBuffer x(oracle::white_noise(1 << 16, 6), kRate);
  const auto y = lowpass_resample(x, {FilterFamily::kButterworth, 0.99 * 22050.0, 4});
  REQUIRE(y.size() == x.size());
  for (double lo = 0.0; lo < 18000.0; lo += 2000.0) {
    const double ex = oracle::band_energy(x.samples, kRate, lo, lo + 2000.0);
    const double ey = oracle::band_energy(y.samples, kRate, lo, lo + 2000.0);
    CAPTURE(lo);
    CHECK(std::abs(10.0 * std::log10(ey / ex)) <= 0.5);
  }
}

TEST_CASE("lowpass_resample keeps DC and preserves length for odd rates") {
  const AudioBuffer dc(std::vector<double>(30000, 0.4), kRate);
  for (double cutoff : {750.0, 1234.5, 8000.0}) {
    const auto y = lowpass_resample(dc, {FilterFamily::kChebyshev1, cutoff, 6});
    REQUIRE(y.size() == dc.size());
    CHECK(std::abs(20.0 * std::log10(y.samples[20000] / 0.4)) <= 0.5);
  }
  const AudioBuffer odd(oracle::white_noise(12347, 7), kRate);
  CHECK(lowpass_resample(odd, {FilterFamily::kBessel, 3333.3, 5}).size() == odd.size());
}

TEST_CASE("add_noise follows the mean-absolute normalization") {
  const AudioBuffer x(oracle::sine(300.0, kRate, 20000, 0.3), kRate);
  const AudioBuffer n(oracle::white_noise(7000, 8, 0.9), kRate);
  for (double snr : {-5.0, 0.0, 20.0, 40.0, 13.7}) {
    const auto y = add_noise(x, n, snr);
    const double expected = mean_abs(x) / std::pow(10.0, snr / 20.0);
    CHECK(std::abs(mean_abs_diff(y, x) / expected - 1.0) <= 1e-9);
  }
  CHECK(std::abs(mean_abs_diff(add_noise(x, n, 0.0), x) - mean_abs(x)) <= 1e-12);
  CHECK(std::abs(mean_abs_diff(add_noise(x, n, 20.0), x) - mean_abs(x) / 10.0) <= 1e-12);
  const auto quiet = add_noise(x, n, 200.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(quiet.samples[i] - x.samples[i]) <= 1e-9);

  CHECK_THROWS_AS(add_noise(x, AudioBuffer(std::vector<double>(100, 0.0), kRate), 10.0),
                  std::invalid_argument);
}

TEST_CASE("tile_noise wraps from the offset") {
  const AudioBuffer n({1, 2, 3, 4}, kRate);
  CHECK(tile_noise(n, 2, 7).samples == std::vector<double>{3, 4, 1, 2, 3, 4, 1});
  CHECK(tile_noise(n, 9, 2).samples == std::vector<double>{2, 3});
}

TEST_CASE("scale multiplies every sample") {
  const AudioBuffer x(oracle::white_noise(1000, 9), kRate);
  CHECK(scale(x, 1.0) == x);
  CHECK(peak(scale(x, 0.3)) == doctest::Approx(0.3 * peak(x)).epsilon(1e-15));
}

TEST_CASE("rng helpers are deterministic and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const long long k = a.uniform_int(2, 10);
    CHECK(k == b.uniform_int(2, 10));
    CHECK(k >= 2);
    CHECK(k <= 10);
  }
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));

  Rng c(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = c.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(std::abs(sq / n - 1.0) <= 0.02);
}

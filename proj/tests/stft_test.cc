// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "restorelab/stft.h"
#include "support/oracles.h"

using namespace restorelab;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("zero audio gives a zero spectrogram") {
  AudioBuffer zeros(std::vector<double>(5000, 0.0), 44100);
  const auto spec = stft(zeros, 2048, 441);
  for (const auto& v : spec.bins.data()) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("frame and bin counts follow centred framing") {
  // Oracle: a frame starting at t*hop in the padded signal (len + window)
  // must fit entirely, i.e. t*hop + window <= len + window.
  const std::size_t len = 44100;
  const int window = 2048, hop = 441;
  std::size_t expected = 0;
  while (expected * hop + window <= len + window) ++expected;
  REQUIRE(expected == 101);

  AudioBuffer x(oracle::white_noise(len, 1), 44100);
  const auto spec = stft(x, window, hop);
  CHECK(spec.frames() == expected);
  CHECK(spec.freqs() == 1025);
}

TEST_CASE("pure tone peaks at the expected bin") {
  AudioBuffer x(oracle::sine(440.0, 44100, 44100), 44100);
  const auto mag = magnitude(stft(x, 2048, 441));
  const auto row = mag.bins.row(50);
  const auto peak = std::max_element(row.begin(), row.end()) - row.begin();
  CHECK(peak == std::lround(440.0 * 2048 / 44100));
}

TEST_CASE("frames match a direct DFT of reflected, windowed samples") {
  const std::vector<double> x = oracle::white_noise(37, 3);
  const int window = 16, hop = 4;
  const auto spec = stft(AudioBuffer(x, 8000), window, hop);

  // Independent reflection: mirror around the first and last sample.
  auto at = [&](long long i) {
    const long long n = static_cast<long long>(x.size());
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return x[static_cast<std::size_t>(i)];
  };
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    std::vector<double> frame(window);
    for (int k = 0; k < window; ++k) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * oracle::kPi * k / window);
      frame[k] = w * at(static_cast<long long>(t) * hop + k - window / 2);
    }
    const auto ref = oracle::naive_rdft(frame);
    for (std::size_t f = 0; f < ref.size(); ++f) {
      CHECK(std::abs(spec.bins(t, f) - ref[f]) < 1e-12);
    }
  }
}

TEST_CASE("istft inverts stft at 2048/441") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t len = 20000 + 3137 * seed;
    AudioBuffer x(oracle::white_noise(len, seed), 44100);
    const auto y = istft(stft(x, 2048, 441), len);
    CHECK(rel_l2(y.samples, x.samples) <= 1e-6);
  }
}

TEST_CASE("istft round trip on signals shorter than the window") {
  AudioBuffer x(oracle::white_noise(300, 9), 44100);
  const auto y = istft(stft(x, 2048, 441), x.size());
  CHECK(rel_l2(y.samples, x.samples) <= 1e-9);
}

TEST_CASE("istft is linear and maps zero to zero") {
  AudioBuffer x(oracle::white_noise(9000, 4), 44100);
  auto spec = stft(x, 2048, 441);
  for (auto& v : spec.bins.data()) v *= 2.0;
  const auto y = istft(spec, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(y.samples[i] - 2.0 * x.samples[i]) <= 1e-6);
  }

  for (auto& v : spec.bins.data()) v = 0.0;
  const auto z = istft(spec, x.size());
  for (double v : z.samples) CHECK(v == 0.0);
}

TEST_CASE("configurations without overlap-add coverage are rejected") {
  AudioBuffer x(oracle::white_noise(4000, 5), 8000);
  const auto spec = stft(x, 64, 64);
  CHECK_THROWS_AS(istft(spec, x.size()), std::invalid_argument);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(stft(AudioBuffer({}, 44100), 2048, 441), std::invalid_argument);
  AudioBuffer x(std::vector<double>(100, 0.1), 44100);
  CHECK_THROWS_AS(stft(x, 2048, 0), std::invalid_argument);
  CHECK_THROWS_AS(stft(x, 256, 512), std::invalid_argument);
}

TEST_CASE("stft is linear") {
  AudioBuffer a(oracle::white_noise(5000, 11), 44100);
  AudioBuffer b(oracle::white_noise(5000, 12), 44100);
  AudioBuffer sum = a;
  for (std::size_t i = 0; i < sum.size(); ++i) sum.samples[i] += 3.0 * b.samples[i];
  const auto sa = stft(a, 512, 128);
  const auto sb = stft(b, 512, 128);
  const auto ss = stft(sum, 512, 128);
  for (std::size_t i = 0; i < ss.bins.size(); ++i) {
    CHECK(std::abs(ss.bins.data()[i] - (sa.bins.data()[i] + 3.0 * sb.bins.data()[i])) < 1e-10);
  }
}

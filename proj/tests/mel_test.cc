// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restorelab/mel.h"
#include "support/oracles.h"

using namespace restorelab;

namespace {

MagnitudeSpectrogram grid_like(std::size_t frames, std::size_t bins, double fill) {
  MagnitudeSpectrogram m;
  m.bins = Grid<double>(frames, bins, fill);
  m.window_size = 2048;
  m.hop = 441;
  m.sample_rate = 44100;
  return m;
}

}  // namespace

TEST_CASE("default filterbank is 1025 x 128") {
  const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0);
  CHECK(fb.freqs() == 1025);
  CHECK(fb.mels() == 128);
}

TEST_CASE("weights are non-negative and every filter is populated") {
  for (MelNorm norm : {MelNorm::kNone, MelNorm::kArea}) {
    const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0, norm);
    for (double w : fb.weights.data()) CHECK(w >= 0.0);
    for (std::size_t m = 0; m < fb.mels(); ++m) {
      double col = 0.0;
      for (std::size_t k = 0; k < fb.freqs(); ++k) col += fb.weights(k, m);
      CHECK(col > 0.0);
    }
  }
}

TEST_CASE("triangles peak at most at one and use the HTK scale") {
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5));
  const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0);
  for (double w : fb.weights.data()) CHECK(w <= 1.0 + 1e-12);
}

TEST_CASE("constant frame gives column sums") {
  const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0);
  const auto mel = apply_mel(grid_like(1, 1025, 1.0), fb);
  for (std::size_t m = 0; m < fb.mels(); ++m) {
    double col = 0.0;
    for (std::size_t k = 0; k < fb.freqs(); ++k) col += fb.weights(k, m);
    CHECK(mel.bins(0, m) == doctest::Approx(col).epsilon(1e-12));
  }
}

TEST_CASE("zero magnitude, impulse rows and linearity") {
  const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0);
  const auto zero = apply_mel(grid_like(3, 1025, 0.0), fb);
  for (double v : zero.bins.data()) CHECK(v == 0.0);

  auto impulse = grid_like(1, 1025, 0.0);
  impulse.bins(0, 300) = 1.0;
  const auto row = apply_mel(impulse, fb);
  for (std::size_t m = 0; m < fb.mels(); ++m) CHECK(row.bins(0, m) == fb.weights(300, m));

  auto a = grid_like(4, 1025, 0.0);
  auto b = grid_like(4, 1025, 0.0);
  const auto na = oracle::white_noise(a.bins.size(), 1, 1.0);
  const auto nb = oracle::white_noise(b.bins.size(), 2, 1.0);
  for (std::size_t i = 0; i < na.size(); ++i) {
    a.bins.data()[i] = std::abs(na[i]);
    b.bins.data()[i] = std::abs(nb[i]);
  }
  auto ab = a;
  for (std::size_t i = 0; i < ab.bins.size(); ++i) ab.bins.data()[i] += b.bins.data()[i];
  const auto ma = apply_mel(a, fb), mb = apply_mel(b, fb), mab = apply_mel(ab, fb);
  for (std::size_t i = 0; i < mab.bins.size(); ++i) {
    CHECK(mab.bins.data()[i] == doctest::Approx(ma.bins.data()[i] + mb.bins.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(mel_filterbank(64, 128, 44100, 0.0, 22050.0), std::invalid_argument);
  CHECK_THROWS_AS(mel_filterbank(2048, 128, 44100, 100.0, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(mel_filterbank(2048, 0, 44100, 0.0, 22050.0), std::invalid_argument);
  // Bands narrower than a bin leave empty filters.
  CHECK_THROWS_AS(mel_filterbank(256, 120, 44100, 0.0, 22050.0), std::invalid_argument);
  const auto fb = mel_filterbank(2048, 128, 44100, 0.0, 22050.0);
  CHECK_THROWS_AS(apply_mel(grid_like(2, 513, 1.0), fb), std::invalid_argument);
}

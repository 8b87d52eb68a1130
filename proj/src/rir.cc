// SPDX-License-Identifier: Apache-2.0

#include "restorelab/rir.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace restorelab {
namespace {

constexpr double kPi = std::numbers::pi;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

bool strictly_inside(const Vec3& p, const Vec3& dims) {
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] > 0.0 && p[a] < dims[a])) return false;
  }
  return true;
}

Vec3 random_direction(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// One-dimensional image coordinates: position and wall-hit count for each
// mirror index along an axis.
struct AxisImage {
  double coord;
  int reflections;
};

std::vector<AxisImage> axis_images(double src, double mic, double len,
                                   double reach) {
  std::vector<AxisImage> out;
  const int n_max = static_cast<int>(std::ceil(reach / (2.0 * len))) + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int q = 0; q <= 1; ++q) {
      const double coord = (q == 0 ? src : -src) + 2.0 * n * len;
      if (std::abs(coord - mic) > reach) continue;
      out.push_back({coord, std::abs(n - q) + std::abs(n)});
    }
  }
  return out;
}

}  // namespace

std::string to_string(MicPattern pattern) {
  return pattern == MicPattern::kCardioid ? "cardioid" : "omnidirectional";
}

MicPattern mic_pattern_from_string(const std::string& name) {
  if (name == "omnidirectional") return MicPattern::kOmnidirectional;
  if (name == "cardioid") return MicPattern::kCardioid;
  throw std::invalid_argument("unknown microphone pattern: " + name);
}

double RoomConfig::distance() const {
  return norm({src_pos[0] - mic_pos[0], src_pos[1] - mic_pos[1],
               src_pos[2] - mic_pos[2]});
}

RoomConfig sample_room(Rng& rng, const RoomSampling& s) {
  int tries = 0;
  auto count = [&] {
    if (++tries > s.max_tries) {
      throw std::runtime_error("sample_room: retry cap exceeded");
    }
  };

  RoomConfig cfg;
  auto draw_dims = [&] {
    for (double& d : cfg.dims) d = rng.uniform(s.dim_min, s.dim_max);
  };
  draw_dims();
  cfg.rt60 = rng.uniform(s.rt60_min, s.rt60_max);
  cfg.pattern = rng.bernoulli(0.5) ? MicPattern::kCardioid
                                   : MicPattern::kOmnidirectional;
  cfg.mic_orientation = random_direction(rng);

  double dist;
  do {
    count();
    dist = rng.normal(s.distance_mean, s.distance_stddev);
  } while (!(dist > 0.0 && dist <= s.distance_max));

  // The distance is kept; placement is redrawn, and the room itself is
  // redrawn when its diagonal cannot hold the distance or placement keeps
  // failing.
  constexpr int kPlacementsPerRoom = 64;
  for (;;) {
    if (norm(cfg.dims) <= dist) {
      count();
      draw_dims();
      continue;
    }
    bool placed = false;
    for (int i = 0; i < kPlacementsPerRoom && !placed; ++i) {
      count();
      for (int a = 0; a < 3; ++a) cfg.mic_pos[a] = rng.uniform(0.0, cfg.dims[a]);
      const Vec3 dir = random_direction(rng);
      for (int a = 0; a < 3; ++a) cfg.src_pos[a] = cfg.mic_pos[a] + dist * dir[a];
      placed = strictly_inside(cfg.mic_pos, cfg.dims) &&
               strictly_inside(cfg.src_pos, cfg.dims);
    }
    if (placed) return cfg;
    draw_dims();
  }
}

void validate(const RoomConfig& cfg, const RoomSampling& s) {
  for (double d : cfg.dims) {
    if (!(d >= s.dim_min && d <= s.dim_max)) {
      throw std::invalid_argument("room: dimension out of range");
    }
  }
  if (!strictly_inside(cfg.mic_pos, cfg.dims) ||
      !strictly_inside(cfg.src_pos, cfg.dims)) {
    throw std::invalid_argument("room: mic and source must be inside the room");
  }
  const double d = cfg.distance();
  if (!(d > 0.0 && d <= s.distance_max)) {
    throw std::invalid_argument("room: source distance out of range");
  }
  if (!(cfg.rt60 >= s.rt60_min && cfg.rt60 <= s.rt60_max)) {
    throw std::invalid_argument("room: rt60 out of range");
  }
}

double eyring_absorption(const Vec3& dims, double rt60) {
  if (!(rt60 > 0.0)) throw std::invalid_argument("eyring: rt60 must be positive");
  const double volume = dims[0] * dims[1] * dims[2];
  const double surface =
      2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  // RT60 = 0.161 V / (-S ln(1 - alpha))
  return 1.0 - std::exp(-0.161 * volume / (surface * rt60));
}

double wall_reflection_coefficient(const RoomConfig& cfg, double ir_seconds) {
  if (!(cfg.rt60 > 0.0)) throw std::invalid_argument("reflection: rt60 must be positive");
  const Vec3& dims = cfg.dims;
  // An image in direction u at distance r has undergone about r * g(u) wall
  // hits, g(u) = sum_i |u_i| / L_i. Images fill space with density 1/V and
  // carry energy beta^(2k) / (4 pi r)^2, so with a = -2 c ln(beta) the late
  // energy arriving per second is c / (4 pi V) * mean_u exp(-a t g(u)). The
  // Schroeder curve adds the direct sound and stops at the IR length T:
  //   EDC(t) = [t < d/c] / (4 pi d)^2
  //          + c / (4 pi V) * mean_u (exp(-a t g) - exp(-a T g)) / (a g).
  // The rate a is adjusted until the same -5..-35 dB line fit that
  // measure_rt60 uses falls 60 dB in rt60 seconds.
  constexpr int kGrid = 32;  // midpoint rule on one octant in (z, phi)
  std::vector<double> g;
  g.reserve(kGrid * kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double z = (i + 0.5) / kGrid;
    const double r = std::sqrt(1.0 - z * z);
    for (int j = 0; j < kGrid; ++j) {
      const double phi = 0.5 * kPi * (j + 0.5) / kGrid;
      g.push_back(r * std::cos(phi) / dims[0] + r * std::sin(phi) / dims[1] + z / dims[2]);
    }
  }
  const double volume = dims[0] * dims[1] * dims[2];
  const double d = cfg.distance();
  const double t_direct = d / kSpeedOfSound;
  const double direct = 1.0 / (16.0 * kPi * kPi * d * d);
  const double late_scale = kSpeedOfSound / (4.0 * kPi * volume * static_cast<double>(g.size()));
  const double T = ir_seconds;

  auto model_rt60 = [&](double a) {
    auto edc = [&](double t) {
      double acc = 0.0;
      for (double v : g) acc += (std::exp(-a * t * v) - std::exp(-a * T * v)) / (a * v);
      return late_scale * acc + (t < t_direct ? direct : 0.0);
    };
    const double e0 = edc(0.0);
    auto level = [&](double t) { return 10.0 * std::log10(edc(t) / e0); };
    auto crossing = [&](double db) {
      double lo = 0.0, hi = T;
      if (level(hi * (1.0 - 1e-9)) > db) return hi;
      for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        (level(mid) > db ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    const double t5 = crossing(-5.0), t35 = crossing(-35.0);
    constexpr int kFit = 48;
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (int i = 0; i < kFit; ++i) {
      const double t = t5 + (t35 - t5) * i / (kFit - 1);
      const double l = level(t);
      st += t;
      sl += l;
      stt += t * t;
      stl += t * l;
    }
    const double slope = (kFit * stl - st * sl) / (kFit * stt - st * st);
    return slope < 0.0 ? -60.0 / slope : std::numeric_limits<double>::infinity();
  };

  // Start from the Eyring rate and rescale; the model RT60 is close to
  // inversely proportional to a.
  double a = -2.0 * kSpeedOfSound * 0.5 * std::log(1.0 - eyring_absorption(dims, cfg.rt60));
  for (int it = 0; it < 12; ++it) {
    const double rt = model_rt60(a);
    if (!std::isfinite(rt)) break;
    const double ratio = rt / cfg.rt60;
    a *= ratio;
    if (std::abs(ratio - 1.0) < 1e-4) break;
  }
  return std::exp(-a / (2.0 * kSpeedOfSound));
}

ImpulseResponse simulate_rir(const RoomConfig& cfg, int sample_rate,
                             const RirOptions& opts) {
  if (sample_rate <= 0) throw std::invalid_argument("simulate_rir: bad sample rate");
  for (double d : cfg.dims) {
    if (!(d > 0.0)) throw std::invalid_argument("simulate_rir: bad room dimensions");
  }
  if (!(cfg.distance() > 0.0)) {
    throw std::invalid_argument("simulate_rir: microphone and source coincide");
  }
  if (!(cfg.rt60 > 0.0)) throw std::invalid_argument("simulate_rir: rt60 must be positive");

  const double fs = sample_rate;
  const auto length = static_cast<std::size_t>(std::ceil(opts.length_factor * cfg.rt60 * fs));
  const double duration = static_cast<double>(length) / fs;
  const double volume = cfg.dims[0] * cfg.dims[1] * cfg.dims[2];

  // Images inside a sphere of radius R number about (4/3) pi R^3 / V; shrink
  // R when that exceeds the budget.
  double reach = kSpeedOfSound * duration;
  const double budget_reach =
      std::cbrt(static_cast<double>(opts.max_images) * 3.0 * volume / (4.0 * kPi));
  reach = std::min(reach, budget_reach);

  const double beta = wall_reflection_coefficient(cfg, duration);
  std::array<std::vector<AxisImage>, 3> axes;
  int max_reflections = 0;
  for (int a = 0; a < 3; ++a) {
    axes[a] = axis_images(cfg.src_pos[a], cfg.mic_pos[a], cfg.dims[a], reach);
    for (const auto& im : axes[a]) max_reflections = std::max(max_reflections, im.reflections);
  }
  std::vector<double> beta_pow(3 * max_reflections + 1);
  for (std::size_t k = 0; k < beta_pow.size(); ++k) beta_pow[k] = std::pow(beta, static_cast<double>(k));

  const int hw = opts.interp_half_width;
  std::vector<double> h(length, 0.0);
  Vec3 orient = cfg.mic_orientation;
  const double on = norm(orient);
  if (cfg.pattern == MicPattern::kCardioid) {
    if (!(on > 0.0)) throw std::invalid_argument("simulate_rir: zero mic orientation");
    for (double& v : orient) v /= on;
  }

  const double reach2 = reach * reach;
  for (const auto& ix : axes[0]) {
    const double dx = ix.coord - cfg.mic_pos[0];
    for (const auto& iy : axes[1]) {
      const double dy = iy.coord - cfg.mic_pos[1];
      const double dxy2 = dx * dx + dy * dy;
      if (dxy2 > reach2) continue;
      for (const auto& iz : axes[2]) {
        const double dz = iz.coord - cfg.mic_pos[2];
        const double d2 = dxy2 + dz * dz;
        if (d2 > reach2) continue;
        const double d = std::sqrt(d2);
        double gain = beta_pow[ix.reflections + iy.reflections + iz.reflections] /
                      (4.0 * kPi * d);
        if (cfg.pattern == MicPattern::kCardioid) {
          const double cos_theta = (dx * orient[0] + dy * orient[1] + dz * orient[2]) / d;
          gain *= 0.5 * (1.0 + cos_theta);
        }
        if (gain == 0.0) continue;
        const double t = d / kSpeedOfSound * fs;
        const auto n0 = static_cast<long long>(std::floor(t));
        // sin(pi (n - t)) alternates in sign between neighbouring n.
        const double s0 = std::sin(kPi * (static_cast<double>(n0) - t));
        for (long long n = n0 - hw + 1; n <= n0 + hw; ++n) {
          if (n < 0 || n >= static_cast<long long>(length)) continue;
          const double x = static_cast<double>(n) - t;
          double sinc;
          if (std::abs(x) < 1e-12) {
            sinc = 1.0;
          } else {
            const double s = ((n - n0) % 2 == 0) ? s0 : -s0;
            sinc = s / (kPi * x);
          }
          const double win = 0.5 + 0.5 * std::cos(kPi * x / hw);
          h[static_cast<std::size_t>(n)] += gain * sinc * win;
        }
      }
    }
  }

  // With all reflection gains positive, dense late arrivals add coherently
  // near DC and stretch the decay; a one-pole DC blocker removes that.
  if (opts.highpass_hz > 0.0) {
    const double r = std::exp(-2.0 * kPi * opts.highpass_hz / fs);
    double prev_x = 0.0, prev_y = 0.0;
    for (double& v : h) {
      const double y = v - prev_x + r * prev_y;
      prev_x = v;
      prev_y = y;
      v = y;
    }
  }

  ImpulseResponse ir;
  ir.audio = AudioBuffer(std::move(h), sample_rate);
  ir.room = cfg;
  ir.covered_seconds = std::min(duration, reach / kSpeedOfSound);
  return ir;
}

double measure_rt60(const AudioBuffer& ir) {
  const std::size_t n = ir.size();
  std::vector<double> edc(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += ir.samples[i] * ir.samples[i];
    edc[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("measure_rt60: silent response");

  auto level_db = [&](std::size_t i) { return 10.0 * std::log10(edc[i] / acc); };
  std::size_t begin = n, end = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) break;
    const double db = level_db(i);
    if (begin == n && db <= -5.0) begin = i;
    if (db >= -35.0) end = i + 1;
  }
  if (begin == n || end <= begin + 1) {
    throw std::domain_error("measure_rt60: decay does not cover -5..-35 dB");
  }

  // Least-squares line through (t, level) on [begin, end).
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double m = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double t = static_cast<double>(i) / ir.sample_rate;
    const double l = level_db(i);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
  }
  const double slope = (m * stl - st * sl) / (m * stt - st * st);
  if (!(slope < 0.0)) throw std::domain_error("measure_rt60: decay is not decreasing");
  return -60.0 / slope;
}

}  // namespace restorelab

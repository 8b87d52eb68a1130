// SPDX-License-Identifier: Apache-2.0
//
// Random shoebox rooms and image-source room impulse responses.

#ifndef RESTORELAB_RIR_H_
#define RESTORELAB_RIR_H_

#include <array>
#include <cstddef>
#include <string>

#include "restorelab/audio.h"
#include "restorelab/random.h"

namespace restorelab {

using Vec3 = std::array<double, 3>;

enum class MicPattern { kOmnidirectional, kCardioid };

std::string to_string(MicPattern pattern);
MicPattern mic_pattern_from_string(const std::string& name);

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct RoomConfig {
  Vec3 dims{};     // metres along x, y, z
  Vec3 mic_pos{};
  Vec3 src_pos{};
  double rt60 = 0.3;  // seconds
  MicPattern pattern = MicPattern::kOmnidirectional;
  Vec3 mic_orientation{1.0, 0.0, 0.0};  // unit vector, used by cardioid

  double distance() const;
  friend bool operator==(const RoomConfig&, const RoomConfig&) = default;
};

/// Distributions used by sample_room.
struct RoomSampling {
  double dim_min = 1.0;
  double dim_max = 12.0;
  double distance_mean = 2.0;
  double distance_stddev = 4.0;
  double distance_max = 5.0;
  double rt60_min = 0.05;
  double rt60_max = 1.0;
  int max_tries = 10000;
};

/// Dimensions ~ U(dim_min, dim_max)^3, RT60 ~ U, pattern uniform. The
/// source distance is drawn from N(mean, stddev^2) until it falls in
/// (0, distance_max]; microphone position and direction are then drawn until
/// the source lands strictly inside the room, redrawing the dimensions when
/// the room is too small for that distance. Throws std::runtime_error when
/// the total number of draws exceeds max_tries.
RoomConfig sample_room(Rng& rng, const RoomSampling& sampling = {});

/// Throws std::invalid_argument if the configuration breaks a RoomConfig
/// invariant (positions outside the room, coincident mic and source, ...).
void validate(const RoomConfig& cfg, const RoomSampling& sampling = {});

struct RirOptions {
  double length_factor = 1.2;        // IR length in units of rt60
  std::size_t max_images = 2000000;  // image budget per response
  int interp_half_width = 8;         // fractional-delay sinc half width
  double highpass_hz = 50.0;         // DC blocker corner, 0 disables
};

struct ImpulseResponse {
  AudioBuffer audio;
  RoomConfig room;
  /// Time covered by image sources; shorter than the IR when the image
  /// budget was exhausted.
  double covered_seconds = 0.0;
};

/// Image-source synthesis with one reflection coefficient for all six walls,
/// chosen by wall_reflection_coefficient so the response decays at rt60.
/// Arrivals are rendered with a Hann-windowed sinc so fractional delays do
/// not comb. Amplitudes follow 1/(4 pi d) before a first-order DC blocker;
/// no normalization is applied.
ImpulseResponse simulate_rir(const RoomConfig& cfg, int sample_rate,
                             const RirOptions& opts = {});

/// Eyring absorption coefficient for a room with the given reverberation time.
double eyring_absorption(const Vec3& dims, double rt60);

/// Pressure reflection coefficient that makes an image-source response of
/// `ir_seconds` in this room measure cfg.rt60 with measure_rt60. Eyring's
/// diffuse-field formula assumes every path meets walls at the mean rate;
/// image sources along the long axes meet fewer walls and dominate the tail,
/// so the coefficient is fitted to a direction-averaged image decay model
/// that also includes the direct sound. Eyring's value is the starting point.
double wall_reflection_coefficient(const RoomConfig& cfg, double ir_seconds);

/// Schroeder backward integration with a line fit on the -5..-35 dB range of
/// the decay curve, extrapolated to -60 dB. Throws std::invalid_argument for
/// a silent response and std::domain_error when the fit range is not
/// covered by at least two samples.
double measure_rt60(const AudioBuffer& ir);
inline double measure_rt60(const ImpulseResponse& ir) {
  return measure_rt60(ir.audio);
}

}  // namespace restorelab

#endif  // RESTORELAB_RIR_H_

// SPDX-License-Identifier: Apache-2.0
//
// Composite random degradation with a replayable record of every step, and
// builders for the paired evaluation sets.

#ifndef RESTORELAB_PIPELINE_H_
#define RESTORELAB_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "restorelab/audio.h"
#include "restorelab/iir.h"

namespace restorelab {

struct Range {
  double low = 0.0;
  double high = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct IntRange {
  int low = 0;
  int high = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct DistortionConfig {
  double p1 = 0.25;  // reverberation
  double p2 = 0.25;  // clipping
  double p3 = 0.5;   // lowpass + resample
  double p4 = 0.5;   // lowpass the noise too; only drawn when p3 fires
  double p5 = 0.5;   // additive noise
  Range eta{0.06, 0.9};
  Range cutoff_hz{750.0, 22050.0};
  IntRange order{2, 10};
  Range snr_db{-5.0, 40.0};
  Range scale{0.3, 1.0};
  std::vector<FilterFamily> families{std::begin(kAllFilterFamilies),
                                     std::end(kAllFilterFamilies)};
  bool trim_reverb = true;  // cut the reverb tail back to the input length

  /// Throws std::invalid_argument on probabilities outside [0, 1], inverted
  /// ranges, eta outside [0, 1], orders outside [1, 24] or an empty family
  /// list.
  void validate() const;

  friend bool operator==(const DistortionConfig&,
                         const DistortionConfig&) = default;
};

/// Cutoffs are clamped to this fraction of Nyquist before design so the
/// upper end of the cutoff range (which may equal Nyquist) stays realizable.
inline constexpr double kMaxCutoffFraction = 0.99;

struct PoolItem {
  std::string id;
  AudioBuffer audio;
};
using Pool = std::vector<PoolItem>;

struct ReverbStep {
  std::string rir_id;
  friend bool operator==(const ReverbStep&, const ReverbStep&) = default;
};
struct ClipStep {
  double eta = 1.0;
  friend bool operator==(const ClipStep&, const ClipStep&) = default;
};
struct LowpassStep {
  FilterFamily family = FilterFamily::kButterworth;
  double cutoff_hz = 0.0;  // after clamping
  int order = 2;
  bool noise_lowpass = false;
  friend bool operator==(const LowpassStep&, const LowpassStep&) = default;
};
struct NoiseStep {
  std::string noise_id;
  std::uint64_t offset = 0;
  double snr_db = 0.0;
  friend bool operator==(const NoiseStep&, const NoiseStep&) = default;
};
using DistortionStep = std::variant<ReverbStep, ClipStep, LowpassStep, NoiseStep>;

/// Everything needed to reproduce one degraded utterance from its clean
/// source and the pools. An empty step list is a valid outcome.
struct DistortionRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;  // derive_seed(master_seed, index)
  std::vector<DistortionStep> steps;
  double q = 1.0;
  bool trim_reverb = true;

  friend bool operator==(const DistortionRecord&,
                         const DistortionRecord&) = default;
};

/// Draws every random quantity for one utterance. The stream always consumes
/// the same number of variates, in a fixed order, whichever branches fire.
/// The noise pool supplies ids and lengths for the offset draw; the sample
/// rate sets the cutoff clamp. Throws if a branch with positive probability
/// has an empty pool.
DistortionRecord sample_record(const DistortionConfig& cfg,
                               std::uint64_t master_seed, std::uint64_t index,
                               const Pool& noise_pool, const Pool& rir_pool,
                               int sample_rate = kDefaultSampleRate);

struct DegradeResult {
  AudioBuffer target;
  AudioBuffer degraded;
  DistortionRecord record;
};

/// Applies a record: reverb, clip, lowpass+resample (optionally also on the
/// noise), noise mixing, then scales both target and degraded by q. The pair
/// always has equal length. Throws std::invalid_argument when the record
/// names an item missing from a pool.
DegradeResult apply_record(const AudioBuffer& s, const Pool& noise_pool,
                           const Pool& rir_pool,
                           const DistortionRecord& record);

DegradeResult degrade(const AudioBuffer& s, const Pool& noise_pool,
                      const Pool& rir_pool, const DistortionConfig& cfg,
                      std::uint64_t master_seed, std::uint64_t index = 0);

/// The degraded buffer reproduced from a record.
AudioBuffer replay(const AudioBuffer& s, const Pool& noise_pool,
                   const Pool& rir_pool, const DistortionRecord& record);

// ---------------------------------------------------------------------------
// Paired evaluation sets.

struct PairedItem {
  std::string id;
  AudioBuffer target;
  AudioBuffer degraded;
  std::optional<DistortionRecord> record;
};

struct PairedSet {
  std::string name;
  std::vector<PairedItem> items;
};

inline constexpr int kSrTestRates[] = {2000, 4000, 8000, 16000, 24000};
inline constexpr int kSrFilterOrder = 8;
inline constexpr double kGsrSegmentSeconds = 3.0;

/// Chebyshev I (order 8, 0.05 dB ripple) at u/2, resampled to u and back.
/// u equal to the corpus rate is a pass-through; u above it, or a corpus not
/// at 44.1 kHz, throws std::invalid_argument.
PairedSet build_sr_testset(const Pool& corpus, int u, int threads = 1);

PairedSet build_declip_testset(const Pool& corpus, double eta, int threads = 1);

/// One randomly chosen response per utterance, tail trimmed to the input.
PairedSet build_dereverb_testset(const Pool& corpus, const Pool& rir_pool,
                                 std::uint64_t seed, int threads = 1);

/// Cuts the corpus into fixed-length segments and degrades each with the
/// composite pipeline, using the segment ordinal as the record index.
PairedSet build_gsr_testset(const Pool& corpus, const Pool& noise_pool,
                            const Pool& rir_pool, const DistortionConfig& cfg,
                            std::uint64_t seed, int threads = 1,
                            double segment_seconds = kGsrSegmentSeconds);

/// Consecutive whole segments of each item; an item shorter than one
/// segment yields a single zero-padded segment and trailing partial
/// segments of longer items are dropped. Ids get a "_sNNN" suffix.
Pool segment_corpus(const Pool& corpus, double segment_seconds);

}  // namespace restorelab

#endif  // RESTORELAB_PIPELINE_H_

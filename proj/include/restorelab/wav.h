// SPDX-License-Identifier: Apache-2.0
//
// RIFF/WAVE reading and writing. Reads 16-bit PCM and 32-bit float, plain or
// extensible, any channel count (downmixed to mono by averaging). Writes
// mono 16-bit PCM or 32-bit float.

#ifndef RESTORELAB_WAV_H_
#define RESTORELAB_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "restorelab/audio.h"

namespace restorelab {

enum class WavFormat { kPcm16, kFloat32 };

std::string to_string(WavFormat format);
WavFormat wav_format_from_string(const std::string& name);

/// Malformed or unsupported file content.
class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

struct EncodedWav {
  std::vector<std::uint8_t> bytes;
  std::size_t clipped = 0;  // pcm16 samples outside [-1, 1 - 2^-15]
};

/// pcm16 clips to [-1, 1 - 2^-15] and rounds sample * 32768 to nearest.
/// Throws std::invalid_argument on non-finite samples.
EncodedWav encode_wav(const AudioBuffer& audio, WavFormat format = WavFormat::kFloat32);

AudioBuffer read_wav(const std::filesystem::path& path);

/// Returns the number of clipped samples (always 0 for float32). Throws
/// std::runtime_error on I/O failure.
std::size_t write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
                      WavFormat format = WavFormat::kFloat32);

}  // namespace restorelab

#endif  // RESTORELAB_WAV_H_

// SPDX-License-Identifier: Apache-2.0

#include "restorelab/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

namespace restorelab {

namespace {

constexpr std::uint16_t kTagPcm = 1;
constexpr std::uint16_t kTagFloat = 3;
constexpr std::uint16_t kTagExtensible = 0xFFFE;

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xFF));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

std::string tag_at(std::span<const std::uint8_t> b, std::size_t at) {
  return std::string(reinterpret_cast<const char*>(b.data() + at), 4);
}

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

std::string to_string(WavFormat format) {
  return format == WavFormat::kPcm16 ? "pcm16" : "float32";
}

WavFormat wav_format_from_string(const std::string& name) {
  if (name == "pcm16") return WavFormat::kPcm16;
  if (name == "float32") return WavFormat::kFloat32;
  throw std::invalid_argument("unknown wav format '" + name + "' (pcm16 or float32)");
}

AudioBuffer decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12) throw WavError("wav: file too short for a RIFF header");
  if (tag_at(b, 0) != "RIFF") throw WavError("wav: missing 'RIFF' header");
  if (tag_at(b, 8) != "WAVE") throw WavError("wav: RIFF form is not 'WAVE'");

  std::optional<Format> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id = tag_at(b, pos);
    const std::uint32_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = b.size() - body;
    if (id == "fmt ") {
      if (size < 16 || avail < 16) throw WavError("wav: truncated 'fmt ' chunk");
      Format f;
      f.tag = get_u16(b, body);
      f.channels = get_u16(b, body + 2);
      f.rate = get_u32(b, body + 4);
      f.bits = get_u16(b, body + 14);
      if (f.tag == kTagExtensible) {
        if (size < 40 || avail < 40) throw WavError("wav: truncated extensible 'fmt ' chunk");
        f.tag = get_u16(b, body + 24);  // first two bytes of the subformat GUID
      }
      fmt = f;
    } else if (id == "data") {
      // A short data chunk is tolerated: streaming writers often leave the
      // size unpatched, so take whatever is present.
      data = b.subspan(body, std::min<std::size_t>(size, avail));
    }
    if (size > avail) break;
    pos = body + size + (size & 1u);
  }
  if (!fmt) throw WavError("wav: missing 'fmt ' chunk");
  if (!data) throw WavError("wav: missing 'data' chunk");
  if (fmt->channels == 0) throw WavError("wav: zero channels");
  if (fmt->rate == 0 || fmt->rate > 1000000) throw WavError("wav: invalid sample rate");

  const bool pcm16 = fmt->tag == kTagPcm && fmt->bits == 16;
  const bool float32 = fmt->tag == kTagFloat && fmt->bits == 32;
  if (!pcm16 && !float32) {
    throw WavError("wav: unsupported encoding (format tag " + std::to_string(fmt->tag) + ", " +
                   std::to_string(fmt->bits) + " bits); only 16-bit PCM and 32-bit float are read");
  }
  const std::size_t width = fmt->bits / 8;
  const std::size_t frame = width * fmt->channels;
  const std::size_t frames = data->size() / frame;
  std::vector<double> out(frames, 0.0);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt->channels; ++c) {
      const std::size_t at = i * frame + c * width;
      if (pcm16) {
        acc += static_cast<std::int16_t>(get_u16(*data, at)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(get_u32(*data, at));
      }
    }
    out[i] = fmt->channels == 1 ? acc : acc / fmt->channels;
  }
  return AudioBuffer(std::move(out), static_cast<int>(fmt->rate));
}

EncodedWav encode_wav(const AudioBuffer& audio, WavFormat format) {
  validate(audio, "write_wav");
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.size() * (bits / 8));
  EncodedWav out;
  auto& b = out.bytes;
  b.reserve(44 + data_bytes);
  put_tag(b, "RIFF");
  put_u32(b, 36 + data_bytes);
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, format == WavFormat::kPcm16 ? kTagPcm : kTagFloat);
  put_u16(b, 1);
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate) * (bits / 8));
  put_u16(b, bits / 8);
  put_u16(b, bits);
  put_tag(b, "data");
  put_u32(b, data_bytes);
  constexpr double kMaxPcm = 1.0 - 1.0 / 32768.0;
  for (double v : audio.samples) {
    if (format == WavFormat::kPcm16) {
      if (v < -1.0 || v > kMaxPcm) ++out.clipped;
      const double c = std::clamp(v, -1.0, kMaxPcm);
      put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32768.0))));
    } else {
      put_u32(b, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (data_bytes & 1u) b.push_back(0);
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const WavError& e) {
    throw WavError(path.string() + ": " + e.what());
  }
}

std::size_t write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
                      WavFormat format) {
  const EncodedWav enc = encode_wav(audio, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(enc.bytes.data()),
            static_cast<std::streamsize>(enc.bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  return enc.clipped;
}

}  // namespace restorelab

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "smdn/errors.hpp"

namespace smdn {

namespace {

constexpr double kScale = 32768.0;

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::int16_t to_pcm(double v) {
  return static_cast<std::int16_t>(std::clamp(std::nearbyint(v * kScale), -32768.0, 32767.0));
}

}  // namespace

Waveform decode_wav(const std::vector<std::uint8_t>& b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("wav: not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id(reinterpret_cast<const char*>(b.data() + pos), 4);
    const std::size_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw FormatError("wav: chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      if (size < 16) throw FormatError("wav: fmt chunk too short");
      const std::uint16_t format = get_u16(b, body);
      const std::uint16_t channels = get_u16(b, body + 2);
      const std::uint32_t rate = get_u32(b, body + 4);
      const std::uint16_t bits = get_u16(b, body + 14);
      if (format != 1) throw FormatError("wav: format tag " + std::to_string(format) + " is not PCM");
      if (channels != 1) throw FormatError("wav: " + std::to_string(channels) + " channels, expected mono");
      if (rate != kSampleRate) throw FormatError("wav: sample rate " + std::to_string(rate) + ", expected 8000");
      if (bits != 16) throw FormatError("wav: " + std::to_string(bits) + " bits per sample, expected 16");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError("wav: odd data chunk size");
      Waveform x(static_cast<Index>(size / 2));
      for (Index i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(static_cast<std::int16_t>(get_u16(b, body + 2 * static_cast<std::size_t>(i)))) / kScale;
      }
      return x;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(have_fmt ? "wav: missing data chunk" : "wav: missing fmt chunk");
}

std::vector<std::uint8_t> encode_wav(const Waveform& x) {
  const auto data_bytes = static_cast<std::uint32_t>(2 * x.size());
  std::vector<std::uint8_t> b;
  b.reserve(44 + data_bytes);
  for (char c : std::string("RIFF")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, 36 + data_bytes);
  for (char c : std::string("WAVEfmt ")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, kSampleRate);
  put_u32(b, kSampleRate * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  for (char c : std::string("data")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, data_bytes);
  for (double v : x) put_u16(b, static_cast<std::uint16_t>(to_pcm(v)));
  return b;
}

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

void write_wav(const std::string& path, const Waveform& x) {
  const auto bytes = encode_wav(x);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("wav: cannot write " + path);
}

Waveform quantize_pcm16(const Waveform& x) {
  return x.unaryExpr([](double v) { return static_cast<double>(to_pcm(v)) / kScale; });
}

}  // namespace smdn

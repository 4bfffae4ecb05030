// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_WAV_HPP_
#define SMDN_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "smdn/tensor.hpp"

namespace smdn {

inline constexpr int kSampleRate = 8000;

/// Decodes a RIFF/WAVE file holding 16-bit PCM, mono, 8000 Hz. Samples are
/// scaled to [-1, 1). Anything else raises FormatError naming the field.
Waveform decode_wav(const std::vector<std::uint8_t>& bytes);

/// Encodes `x` as 16-bit PCM mono 8000 Hz. Values are rounded to the nearest
/// int16 step and clipped.
std::vector<std::uint8_t> encode_wav(const Waveform& x);

Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& x);

/// Rounds to the int16 grid used by encode_wav, so that write/read is exact.
Waveform quantize_pcm16(const Waveform& x);

}  // namespace smdn

#endif  // SMDN_WAV_HPP_

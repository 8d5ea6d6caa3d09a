// Copyright 2026 The hapredict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hapredict/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hapredict/error.h"

namespace hapredict {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t Read16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

uint32_t Read32(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) |
         (static_cast<uint32_t>(b[at + 3]) << 24);
}

void Append16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void Append32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<uint8_t>((v >> shift) & 0xFF));
  }
}

void AppendTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool TagIs(std::span<const uint8_t> b, size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

[[noreturn]] void FormatError(const std::string& what) {
  throw Error(ErrorKind::kFormat, "WAV: " + what);
}

}  // namespace

AudioSignal DecodeWav(std::span<const uint8_t> bytes, double ref_spl_db,
                      WavSpec* spec_out) {
  if (bytes.size() < 12 || !TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE")) {
    FormatError("missing RIFF/WAVE header");
  }
  bool have_fmt = false;
  uint16_t format = 0;
  int channels = 0;
  int rate = 0;
  int bits = 0;
  std::span<const uint8_t> data;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t size = Read32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (TagIs(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) FormatError("truncated fmt chunk");
      format = Read16(bytes, body);
      channels = Read16(bytes, body + 2);
      rate = static_cast<int>(Read32(bytes, body + 4));
      bits = Read16(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) FormatError("truncated extensible fmt chunk");
        // First two bytes of the sub-format GUID carry the real format tag.
        format = Read16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      // Streaming writers may leave the size unset; take what is present.
      const size_t available = bytes.size() - body;
      data = bytes.subspan(body, std::min<size_t>(size, available));
      have_data = true;
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) FormatError("missing fmt chunk");
  if (!have_data) FormatError("missing data chunk");
  if (channels < 1 || channels > 2) FormatError("only mono or stereo supported");
  if (rate <= 0) FormatError("invalid sample rate");

  WavSpec spec{channels, rate, WavEncoding::kPcm16};
  size_t bytes_per_sample = 0;
  if (format == kFormatPcm && bits == 16) {
    spec.encoding = WavEncoding::kPcm16;
    bytes_per_sample = 2;
  } else if (format == kFormatFloat && bits == 32) {
    spec.encoding = WavEncoding::kFloat32;
    bytes_per_sample = 4;
  } else {
    FormatError("unsupported encoding (format " + std::to_string(format) +
                ", " + std::to_string(bits) + " bits)");
  }
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data.size() / frame_bytes;
  if (frames == 0) {
    throw Error(ErrorKind::kEmptySignal, "WAV: data chunk holds no frames");
  }

  std::vector<std::vector<double>> samples(channels, std::vector<double>(frames));
  for (size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const size_t at = i * frame_bytes + c * bytes_per_sample;
      if (spec.encoding == WavEncoding::kPcm16) {
        samples[c][i] = static_cast<int16_t>(Read16(data, at)) / 32768.0;
      } else {
        samples[c][i] = std::bit_cast<float>(Read32(data, at));
      }
    }
  }
  if (spec_out != nullptr) *spec_out = spec;
  return AudioSignal(std::move(samples), rate, ref_spl_db);
}

AudioSignal ReadWav(const std::filesystem::path& path, double ref_spl_db,
                    WavSpec* spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return DecodeWav(bytes, ref_spl_db, spec);
}

EncodedWav EncodeWav(const AudioSignal& signal, WavEncoding encoding) {
  const int channels = signal.num_channels();
  if (channels < 1 || channels > 2) {
    throw Error(ErrorKind::kFormat, "WAV: only mono or stereo supported");
  }
  const size_t frames = signal.num_frames();
  const uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const uint32_t block_align = channels * bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(frames * block_align);

  EncodedWav out;
  auto& b = out.bytes;
  b.reserve(44 + data_size);
  AppendTag(b, "RIFF");
  Append32(b, 36 + data_size);
  AppendTag(b, "WAVE");
  AppendTag(b, "fmt ");
  Append32(b, 16);
  Append16(b, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  Append16(b, static_cast<uint16_t>(channels));
  Append32(b, static_cast<uint32_t>(signal.sample_rate_hz()));
  Append32(b, static_cast<uint32_t>(signal.sample_rate_hz()) * block_align);
  Append16(b, static_cast<uint16_t>(block_align));
  Append16(b, bits);
  AppendTag(b, "data");
  Append32(b, data_size);

  for (size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      double x = signal.channel(c)[i];
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::kInvalidArgument, "WAV: non-finite sample");
      }
      if (std::abs(x) > 1.0) {
        ++out.result.clip_count;
        x = std::clamp(x, -1.0, 1.0);
      }
      if (encoding == WavEncoding::kPcm16) {
        const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
        Append16(b, static_cast<uint16_t>(static_cast<int16_t>(q)));
      } else {
        Append32(b, std::bit_cast<uint32_t>(static_cast<float>(x)));
      }
    }
  }
  return out;
}

WavWriteResult WriteWav(const AudioSignal& signal,
                        const std::filesystem::path& path,
                        WavEncoding encoding) {
  EncodedWav encoded = EncodeWav(signal, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(encoded.bytes.data()),
            static_cast<std::streamsize>(encoded.bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
  return encoded.result;
}

}  // namespace hapredict

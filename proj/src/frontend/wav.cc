// Copyright 2026 The deskasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "frontend/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace deskasr::frontend {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const std::string& b, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 3])) << 24;
}

uint16_t ReadU16(const std::string& b, size_t pos) {
  return static_cast<uint16_t>(
      static_cast<uint8_t>(b[pos]) |
      static_cast<uint16_t>(static_cast<uint8_t>(b[pos + 1])) << 8);
}

void PutU32(std::string& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xFF));
  b.push_back(static_cast<char>(v >> 8));
}

[[noreturn]] void Fail(const std::string& origin, const std::string& what) {
  throw AudioError((origin.empty() ? std::string("wav") : origin) + ": " +
                   what);
}

}  // namespace

Waveform ParseWav(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    Fail(origin, "not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t size = ReadU32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (body + size > bytes.size()) Fail(origin, "truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) Fail(origin, "fmt chunk too small");
      format = ReadU16(bytes, body);
      channels = ReadU16(bytes, body + 2);
      rate = ReadU32(bytes, body + 4);
      bits = ReadU16(bytes, body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = ReadU16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) Fail(origin, "data chunk before fmt chunk");
      if (channels != 1) {
        Fail(origin, "expected mono audio, got " + std::to_string(channels) +
                         " channels");
      }
      if (rate != static_cast<uint32_t>(kSampleRate)) {
        Fail(origin, "expected 16000 Hz, got " + std::to_string(rate) +
                         " Hz (no resampling is performed)");
      }
      Waveform w;
      if (format == kFormatPcm && bits == 16) {
        const size_t n = size / 2;
        w.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          const auto v = static_cast<int16_t>(ReadU16(bytes, body + 2 * i));
          w.samples[i] = static_cast<double>(v) / 32768.0;
        }
      } else if (format == kFormatFloat && bits == 32) {
        const size_t n = size / 4;
        w.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          const uint32_t u = ReadU32(bytes, body + 4 * i);
          float f;
          std::memcpy(&f, &u, sizeof(f));
          w.samples[i] = f;
        }
      } else {
        Fail(origin, "unsupported sample format " + std::to_string(format) +
                         " with " + std::to_string(bits) + " bits");
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  Fail(origin, "no data chunk");
}

Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AudioError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseWav(ss.str(), path);
}

std::string SerializeWav(const Waveform& wave, WavEncoding encoding) {
  if (wave.sample_rate != kSampleRate) {
    throw AudioError("only 16000 Hz audio can be written");
  }
  const bool pcm = encoding == WavEncoding::kPcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint32_t data_size =
      static_cast<uint32_t>(wave.samples.size() * (bits / 8));
  std::string b;
  b.reserve(44 + data_size);
  b += "RIFF";
  PutU32(b, 36 + data_size);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, pcm ? kFormatPcm : kFormatFloat);
  PutU16(b, 1);
  PutU32(b, kSampleRate);
  PutU32(b, kSampleRate * (bits / 8));
  PutU16(b, bits / 8);
  PutU16(b, bits);
  b += "data";
  PutU32(b, data_size);
  for (double s : wave.samples) {
    if (pcm) {
      const double c = std::clamp(s, -1.0, 32767.0 / 32768.0);
      PutU16(b, static_cast<uint16_t>(
                    static_cast<int16_t>(std::lround(c * 32768.0))));
    } else {
      const float f = static_cast<float>(s);
      uint32_t u;
      std::memcpy(&u, &f, sizeof(u));
      PutU32(b, u);
    }
  }
  return b;
}

void WriteWav(const std::string& path, const Waveform& wave,
              WavEncoding encoding) {
  const std::string bytes = SerializeWav(wave, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AudioError(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw AudioError(path + ": write failed");
}

}  // namespace deskasr::frontend

// Copyright (c) 2026 The tsx project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dsp/wav.h"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "util/error.h"

namespace tsx {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

template <typename T>
T ReadLE(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <typename T>
void WriteLE(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

MultiWave ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TSX_CHECK(in.good(), "wav", "cannot open " << path);

  char riff[4], wave[4];
  in.read(riff, 4);
  ReadLE<uint32_t>(in);  // riff size
  in.read(wave, 4);
  TSX_CHECK(std::memcmp(riff, "RIFF", 4) == 0 && std::memcmp(wave, "WAVE", 4) == 0,
            "wav", path << " is not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  std::vector<char> payload;
  bool have_fmt = false, have_data = false;

  while (in.good() && !(have_fmt && have_data)) {
    char id[4];
    in.read(id, 4);
    if (!in.good()) break;
    uint32_t size = ReadLE<uint32_t>(in);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = ReadLE<uint16_t>(in);
      channels = ReadLE<uint16_t>(in);
      sample_rate = ReadLE<uint32_t>(in);
      ReadLE<uint32_t>(in);  // byte rate
      ReadLE<uint16_t>(in);  // block align
      bits = ReadLE<uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      payload.resize(size);
      in.read(payload.data(), size);
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  TSX_CHECK(have_fmt && have_data, "wav", path << ": missing fmt or data chunk");
  TSX_CHECK(channels >= 1, "wav", path << ": zero channels");

  MultiWave out;
  out.sample_rate = static_cast<int>(sample_rate);
  int64_t frames = 0;
  if (format == kFormatPcm && bits == 16) {
    frames = static_cast<int64_t>(payload.size()) / (2 * channels);
    out.samples.resize(channels, frames);
    const int16_t* p = reinterpret_cast<const int16_t*>(payload.data());
    for (int64_t i = 0; i < frames; ++i)
      for (int c = 0; c < channels; ++c)
        out.samples(c, i) = static_cast<double>(p[i * channels + c]) / 32768.0;
  } else if (format == kFormatFloat && bits == 32) {
    frames = static_cast<int64_t>(payload.size()) / (4 * channels);
    out.samples.resize(channels, frames);
    const float* p = reinterpret_cast<const float*>(payload.data());
    for (int64_t i = 0; i < frames; ++i)
      for (int c = 0; c < channels; ++c)
        out.samples(c, i) = static_cast<double>(p[i * channels + c]);
  } else {
    TSX_CHECK(false, "wav",
              path << ": unsupported format (" << format << ", " << bits
                   << " bit); expected PCM16 or float32");
  }
  return out;
}

void WriteWav(const std::string& path, const MultiWave& audio, WavFormat format) {
  const int channels = audio.channels();
  const int64_t frames = audio.num_samples();
  TSX_CHECK(channels >= 1, "wav", "cannot write zero channels");

  std::ofstream out(path, std::ios::binary);
  TSX_CHECK(out.good(), "wav", "cannot open " << path << " for writing");

  const bool pcm = format == WavFormat::kPcm16;
  const uint16_t bytes_per = pcm ? 2 : 4;
  const uint32_t data_size =
      static_cast<uint32_t>(frames * channels * bytes_per);

  out.write("RIFF", 4);
  WriteLE<uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteLE<uint32_t>(out, 16);
  WriteLE<uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  WriteLE<uint16_t>(out, static_cast<uint16_t>(channels));
  WriteLE<uint32_t>(out, static_cast<uint32_t>(audio.sample_rate));
  WriteLE<uint32_t>(out, static_cast<uint32_t>(audio.sample_rate) * channels * bytes_per);
  WriteLE<uint16_t>(out, static_cast<uint16_t>(channels * bytes_per));
  WriteLE<uint16_t>(out, pcm ? 16 : 32);
  out.write("data", 4);
  WriteLE<uint32_t>(out, data_size);

  for (int64_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      double v = audio.samples(c, i);
      if (pcm) {
        double clipped = std::clamp(v, -1.0, 1.0);
        WriteLE<int16_t>(out, static_cast<int16_t>(std::lrint(clipped * 32767.0)));
      } else {
        WriteLE<float>(out, static_cast<float>(v));
      }
    }
  }
  TSX_CHECK(out.good(), "wav", "short write to " << path);
}

void WriteWav(const std::string& path, const Wave& mono, int sample_rate,
              WavFormat format) {
  MultiWave mw;
  mw.sample_rate = sample_rate;
  mw.samples.resize(1, mono.size());
  mw.samples.row(0) = mono.transpose();
  WriteWav(path, mw, format);
}

}  // namespace tsx

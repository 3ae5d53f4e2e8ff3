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

#ifndef TSX_DSP_WAV_H_
#define TSX_DSP_WAV_H_

#include <string>

#include "dsp/audio.h"

namespace tsx {

enum class WavFormat { kPcm16, kFloat32 };

// Reads a RIFF WAV file (PCM16 or IEEE float32), any channel count.
MultiWave ReadWav(const std::string& path);

// Writes all channels. Float data is assumed in [-1, 1] for PCM16 (clipped).
void WriteWav(const std::string& path, const MultiWave& audio,
              WavFormat format = WavFormat::kFloat32);

void WriteWav(const std::string& path, const Wave& mono, int sample_rate,
              WavFormat format = WavFormat::kFloat32);

}  // namespace tsx

#endif  // TSX_DSP_WAV_H_

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

#ifndef TSX_SIM_RIR_H_
#define TSX_SIM_RIR_H_

#include <vector>

#include "dsp/audio.h"
#include "sim/scene.h"

namespace tsx {

enum class SourceTag { kDesired, kInterferer, kNoise };

struct ImpulseResponseSet {
  std::vector<Wave> rirs;  // one per microphone, 8 kHz
  SourceTag source_tag = SourceTag::kDesired;
  int sample_rate = kSampleRate;
};

// Image-method simulation with frequency-independent uniform wall absorption.
// The reflection coefficient starts from the Eyring inversion of the scene
// RT60 and is then calibrated against a measured probe decay: the raw image
// method decays noticeably slower than the statistical prediction once the
// low-reflection axial paths dominate. The calibration is a pure function of
// the room and target RT60, so all sources in a scene share one coefficient.
ImpulseResponseSet SimulateRir(const RoomScene& scene, SourceTag source);

// RT60 from the Schroeder energy-decay curve, fit on the -5..-25 dB span.
double MeasureRt60(const Wave& rir, int sample_rate = kSampleRate);

// Index of the first tap with magnitude above 1e-4 of the peak.
int64_t FirstTapIndex(const Wave& rir);

}  // namespace tsx

#endif  // TSX_SIM_RIR_H_

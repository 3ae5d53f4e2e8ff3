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

#ifndef TSX_SIM_MIX_H_
#define TSX_SIM_MIX_H_

#include "dsp/audio.h"
#include "sim/rir.h"
#include "sim/scene.h"

namespace tsx {

constexpr int kSegmentSamples = 32000;  // 4 s at 8 kHz

struct MixtureExample {
  MultiWave mixture;          // J channels
  Wave target_reverb;         // desired source at mic 1
  Wave interferer_reverb;     // interferer at mic 1
  RoomScene scene;

  // Scaled rendered components; mixture is their exact sum.
  MultiWave rendered_desired, rendered_interferer, rendered_noise;
  bool interferer_silent = false;
};

// Convolves a dry mono 8 kHz signal with each microphone's RIR, truncated to
// the dry length.
MultiWave RenderSource(const Wave& dry, int sample_rate,
                       const ImpulseResponseSet& rirs);

// Realizes the array capture: desired and interferer rendered at the
// configured SIR at mic 1 (0 dB by default), noise scaled so the speech-sum
// to noise power ratio at mic 1 equals scene.mix_snr_db. Pass an infinite
// mix_snr_db to drop the noise term.
MixtureExample MixScene(const RoomScene& scene, const Wave& dry_desired,
                        const Wave& dry_interferer, const Wave& dry_noise);

// Crops to 4 s, tiling signals that are shorter.
Wave TileCrop(const Wave& w, int64_t target_len = kSegmentSamples);

}  // namespace tsx

#endif  // TSX_SIM_MIX_H_

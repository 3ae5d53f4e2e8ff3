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

#ifndef TSX_DSP_RESAMPLE_H_
#define TSX_DSP_RESAMPLE_H_

#include "dsp/audio.h"

namespace tsx {

// Rational-ratio windowed-sinc resampler to 8 kHz. Anti-alias cutoff at
// 0.45 * 8 kHz. src_rate == 8000 is a bit-exact passthrough; src_rate below
// 8000 is refused (no upsampling path).
Wave ResampleTo8k(const Wave& signal, int src_rate);

}  // namespace tsx

#endif  // TSX_DSP_RESAMPLE_H_

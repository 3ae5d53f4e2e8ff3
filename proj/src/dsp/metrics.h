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

#ifndef TSX_DSP_METRICS_H_
#define TSX_DSP_METRICS_H_

#include "dsp/audio.h"

namespace tsx {

constexpr double kSiSdrClampDb = 60.0;

// Scale-invariant SDR in dB, clamped to [-60, 60]. The scale projection is
// alpha = <est, ref> / ||ref||^2; value = 10 log10(||alpha ref||^2 /
// ||alpha ref - est||^2).
double SiSdr(const Wave& estimate, const Wave& reference);

// SiSdr(estimate, reference) - SiSdr(mixture_ch1, reference).
double SiSdrImprovement(const Wave& estimate, const Wave& mixture_ch1,
                        const Wave& reference);

}  // namespace tsx

#endif  // TSX_DSP_METRICS_H_

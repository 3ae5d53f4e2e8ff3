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

#ifndef TSX_DSP_AUDIO_H_
#define TSX_DSP_AUDIO_H_

#include <Eigen/Dense>

namespace tsx {

// Mono waveform, one sample per entry.
using Wave = Eigen::ArrayXd;

// Multichannel waveform: one row per channel.
struct MultiWave {
  Eigen::ArrayXXd samples;  // (channels, num_samples)
  int sample_rate = 8000;

  int channels() const { return static_cast<int>(samples.rows()); }
  Eigen::Index num_samples() const { return samples.cols(); }
  Wave channel(int c) const { return samples.row(c).transpose(); }
};

inline double Power(const Wave& w) {
  if (w.size() == 0) return 0.0;
  return w.square().sum() / static_cast<double>(w.size());
}

}  // namespace tsx

#endif  // TSX_DSP_AUDIO_H_

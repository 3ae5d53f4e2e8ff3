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

#ifndef TSX_MODEL_DOA_NET_H_
#define TSX_MODEL_DOA_NET_H_

#include <memory>
#include <string>
#include <vector>

#include "model/config.h"
#include "model/conv_stack.h"
#include "nn/checkpoint.h"
#include "nn/optim.h"

namespace tsx {

// Multi-label grid DOA estimator: conv encoder (half-width mixture encoder),
// frame-mean pooling, linear head to 91 per-bin logits.
class DoaNet {
 public:
  explicit DoaNet(const DoaConfig& cfg);

  // mix_ri: (2J, K, T) -> logits [91]. Mode-free forward (instance norm).
  nn::Var Run(nn::Tape& t, const nn::Tensor& mix_ri);

  // Per-bin probabilities from a multichannel waveform.
  std::vector<double> Probs(const MultiWave& mixture);

  const DoaConfig& config() const { return cfg_; }
  const StftEngine& stft() const { return engine_; }
  nn::ParamStore& params() { return ps_; }

  void Save(const std::string& path, const nn::AdamW* opt,
            nlohmann::json meta = nlohmann::json::object());
  nlohmann::json Load(const std::string& path, nn::AdamW* opt = nullptr);
  static std::unique_ptr<DoaNet> FromCheckpoint(const std::string& path);

 private:
  DoaConfig cfg_;
  StftEngine engine_;
  nn::ParamStore ps_;
  std::unique_ptr<ConvStack> enc_;
};

struct DoaPick {
  int theta_a = 0, theta_b = 0;  // ascending degrees
  bool fallback = false;         // true when suppression found < 2 peaks
};

// Two highest peaks under non-max suppression of radius +-2 bins (+-4
// degrees). Falls back to the top-2 raw bins (flagged) when suppression
// leaves fewer than two peaks above a 1e-6 floor.
DoaPick PickTwoDoas(const std::vector<double>& probs);

}  // namespace tsx

#endif  // TSX_MODEL_DOA_NET_H_

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

#ifndef TSX_MODEL_CONFIG_H_
#define TSX_MODEL_CONFIG_H_

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "dsp/stft.h"

namespace tsx {

// Extraction-network hyperparameters. The full-size model uses the defaults;
// tests shrink channels/width to stay CPU-friendly.
struct ModelConfig {
  std::vector<int> encoder_channels{16, 32, 64, 64, 128, 128};
  int bottleneck_dim = 256;  // D
  int attention_heads = 4;
  int doa_bins = 91;
  int class_count = 3;
  // 0 keeps the FiLM nets a single affine layer; >0 inserts one hidden layer.
  int film_hidden = 0;
  int mix_channels = 4;  // J microphones
  bool classifier_stop_gradient = false;
  StftConfig stft;
  uint64_t init_seed = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);

  // Frequency sizes across the encoder: f -> (f-1)/2 + 1 per stage
  // (kernel 3, stride 2, pad 1 keeps odd sizes odd so the transpose conv
  // inverts the chain exactly).
  std::vector<int> FreqSizes() const;
};

// Grid DOA estimator hyperparameters; the encoder mirrors the extraction
// network's at half width.
struct DoaConfig {
  std::vector<int> encoder_channels{8, 16, 32, 32, 64, 64};
  int embed_dim = 128;
  int doa_bins = 91;
  int mix_channels = 4;
  StftConfig stft;
  uint64_t init_seed = 2;

  void Validate() const;
  nlohmann::json ToJson() const;
  static DoaConfig FromJson(const nlohmann::json& j);
};

nlohmann::json StftConfigToJson(const StftConfig& c);
StftConfig StftConfigFromJson(const nlohmann::json& j);

}  // namespace tsx

#endif  // TSX_MODEL_CONFIG_H_

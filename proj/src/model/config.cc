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

#include "model/config.h"

#include "util/error.h"

namespace tsx {

namespace {

std::vector<int> FreqChain(int bins, size_t stages) {
  std::vector<int> f{bins};
  for (size_t s = 0; s < stages; ++s) {
    TSX_CHECK(f.back() % 2 == 1 && f.back() >= 3, "model-config",
              "frequency size " << f.back() << " cannot be halved at stage " << s);
    f.push_back((f.back() - 1) / 2 + 1);
  }
  return f;
}

}  // namespace

void ModelConfig::Validate() const {
  stft.Validate();
  TSX_CHECK(!encoder_channels.empty() && encoder_channels.size() <= 6,
            "model-config", "encoder stage count must be in [1,6]");
  for (int c : encoder_channels)
    TSX_CHECK(c >= 1, "model-config", "non-positive channel count");
  TSX_CHECK(bottleneck_dim >= 1, "model-config", "bottleneck_dim must be positive");
  TSX_CHECK(attention_heads >= 1 && bottleneck_dim % attention_heads == 0,
            "model-config", "bottleneck_dim must divide evenly into heads");
  TSX_CHECK(doa_bins == 91, "model-config", "DOA grid is fixed at 91 bins");
  TSX_CHECK(class_count == 3, "model-config", "classifier is 3-way");
  TSX_CHECK(film_hidden >= 0, "model-config", "film_hidden must be >= 0");
  TSX_CHECK(mix_channels >= 1, "model-config", "need at least one microphone");
  FreqChain(stft.bins_kept, encoder_channels.size());
}

std::vector<int> ModelConfig::FreqSizes() const {
  return FreqChain(stft.bins_kept, encoder_channels.size());
}

nlohmann::json StftConfigToJson(const StftConfig& c) {
  return {{"frame_size", c.frame_size},
          {"hop", c.hop},
          {"bins_kept", c.bins_kept},
          {"sample_rate", c.sample_rate}};
}

StftConfig StftConfigFromJson(const nlohmann::json& j) {
  StftConfig c;
  c.frame_size = j.at("frame_size");
  c.hop = j.at("hop");
  c.bins_kept = j.at("bins_kept");
  c.sample_rate = j.at("sample_rate");
  c.Validate();
  return c;
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"encoder_channels", encoder_channels},
          {"bottleneck_dim", bottleneck_dim},
          {"attention_heads", attention_heads},
          {"doa_bins", doa_bins},
          {"class_count", class_count},
          {"film_hidden", film_hidden},
          {"mix_channels", mix_channels},
          {"classifier_stop_gradient", classifier_stop_gradient},
          {"stft", StftConfigToJson(stft)},
          {"init_seed", init_seed}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  if (j.contains("encoder_channels"))
    c.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
  c.bottleneck_dim = j.value("bottleneck_dim", c.bottleneck_dim);
  c.attention_heads = j.value("attention_heads", c.attention_heads);
  c.doa_bins = j.value("doa_bins", c.doa_bins);
  c.class_count = j.value("class_count", c.class_count);
  c.film_hidden = j.value("film_hidden", c.film_hidden);
  c.mix_channels = j.value("mix_channels", c.mix_channels);
  c.classifier_stop_gradient =
      j.value("classifier_stop_gradient", c.classifier_stop_gradient);
  if (j.contains("stft")) c.stft = StftConfigFromJson(j.at("stft"));
  c.init_seed = j.value("init_seed", c.init_seed);
  c.Validate();
  return c;
}

void DoaConfig::Validate() const {
  stft.Validate();
  TSX_CHECK(!encoder_channels.empty() && encoder_channels.size() <= 6,
            "doa-config", "encoder stage count must be in [1,6]");
  TSX_CHECK(embed_dim >= 1, "doa-config", "embed_dim must be positive");
  TSX_CHECK(doa_bins == 91, "doa-config", "DOA grid is fixed at 91 bins");
  TSX_CHECK(mix_channels >= 1, "doa-config", "need at least one microphone");
  FreqChain(stft.bins_kept, encoder_channels.size());
}

nlohmann::json DoaConfig::ToJson() const {
  return {{"encoder_channels", encoder_channels},
          {"embed_dim", embed_dim},
          {"doa_bins", doa_bins},
          {"mix_channels", mix_channels},
          {"stft", StftConfigToJson(stft)},
          {"init_seed", init_seed}};
}

DoaConfig DoaConfig::FromJson(const nlohmann::json& j) {
  DoaConfig c;
  if (j.contains("encoder_channels"))
    c.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.doa_bins = j.value("doa_bins", c.doa_bins);
  c.mix_channels = j.value("mix_channels", c.mix_channels);
  if (j.contains("stft")) c.stft = StftConfigFromJson(j.at("stft"));
  c.init_seed = j.value("init_seed", c.init_seed);
  c.Validate();
  return c;
}

}  // namespace tsx

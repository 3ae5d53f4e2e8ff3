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

#ifndef TSX_MODEL_EXTRACTOR_H_
#define TSX_MODEL_EXTRACTOR_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "model/config.h"
#include "model/conv_stack.h"
#include "nn/checkpoint.h"
#include "nn/optim.h"

namespace tsx {

// Target-speaker extraction network. Pipeline: mixture encoder -> FiLM with
// the fused enrollment embedding -> self-attention (pass 1) -> scenario
// classifier -> FiLM-derived guidance -> second FiLM of the mixture embedding
// -> self-attention (pass 2) -> skip-connected transpose-conv decoder ->
// single-source RI spectrogram -> synthesis.
class ExtractorModel {
 public:
  explicit ExtractorModel(const ModelConfig& cfg);

  struct Forward {
    nn::Var estimate;      // waveform, (T-1)*hop + frame_size samples
    nn::Var class_logits;  // [3]
    nn::Var film1;         // [T,D] first-pass FiLM output
    nn::Var emb_x;         // [T,D] mixture embedding pre-FiLM
  };

  // mix_ri: (2J, K, T); enroll_ri: (2, K, T'); theta_deg on the 2-degree grid.
  // The forward is mode-free: instance normalization uses the same statistics
  // during training and inference.
  Forward Run(nn::Tape& t, const nn::Tensor& mix_ri, const nn::Tensor& enroll_ri,
              int theta_deg);

  // Extraction from waveforms; optionally reports softmax class
  // probabilities.
  Wave Extract(const MultiWave& mixture, const Wave& enrollment, int theta_deg,
               std::vector<double>* class_probs = nullptr);

  const ModelConfig& config() const { return cfg_; }
  const StftEngine& stft() const { return engine_; }
  nn::ParamStore& params() { return ps_; }

  void Save(const std::string& path, const nn::AdamW* opt,
            nlohmann::json meta = nlohmann::json::object());
  nlohmann::json Load(const std::string& path, nn::AdamW* opt = nullptr);
  static std::unique_ptr<ExtractorModel> FromCheckpoint(const std::string& path);

 private:
  nn::Var FilmNet(nn::Tape& t, const std::string& name, nn::Var cond);
  nn::Var Attend(nn::Tape& t, nn::Var frames, int pass);
  const nn::Tensor& PositionalEncoding(int frames);
  void RegisterFilmNet(const std::string& name, double bias_value, Rng& rng);

  ModelConfig cfg_;
  StftEngine engine_;
  nn::ParamStore ps_;
  std::unique_ptr<ConvStack> mix_enc_, enr_enc_;
  std::map<int, nn::Tensor> pe_cache_;
};

}  // namespace tsx

#endif  // TSX_MODEL_EXTRACTOR_H_

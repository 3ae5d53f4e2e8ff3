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

#ifndef TSX_TRAIN_TRAINER_H_
#define TSX_TRAIN_TRAINER_H_

#include <string>
#include <vector>

#include "data/example.h"
#include "model/doa_net.h"
#include "model/extractor.h"

namespace tsx {

// Training recipes: which scenario set each example contributes.
//   proposed      all three scenarios (correct, erroneous DOA, erroneous ref)
//   no_3b         only the nominal scenario
//   spectral_only correct ref with a random DOA every step
//   spatial_only  Gaussian-noise ref with the correct (perturbed) DOA
enum class TrainRecipe { kProposed, kNo3b, kSpectralOnly, kSpatialOnly };

TrainRecipe ParseTrainRecipe(const std::string& name);
std::string TrainRecipeName(TrainRecipe r);

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 14;
  double ce_weight = 1.0;
  double weight_decay = 1e-2;
  double grad_clip = 0.0;  // 0 disables clipping
  int max_steps = 1000;
  int val_interval = 0;  // 0 disables validation/checkpoint selection
  uint64_t seed = 0;
  TrainRecipe recipe = TrainRecipe::kProposed;

  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct TrainItem {
  MixtureExample example;
  EnrollmentBundle bundle;
};

// Per-step loss bookkeeping. total = sisdr_nominal + sisdr_rnd_doa +
// sisdr_rnd_ref + ce_weight * ce, each term batch-averaged; ce is the
// per-example mean over its scenario instances.
struct LossBreakdown {
  double sisdr_nominal = 0, sisdr_rnd_doa = 0, sisdr_rnd_ref = 0;
  double ce = 0, total = 0;
  double classifier_accuracy = 0;  // over all scenario instances in the batch
};

// theta_d + delta, delta uniform on {-4,-2,0,+2,+4} degrees, clamped to
// [0, 180].
int PerturbDoa(int theta_d_deg, Rng& rng);

// One optimizer update over a batch. Gradients accumulate across the
// scenarios of every item; throws with a diagnostic on a non-finite loss.
LossBreakdown TrainingStep(ExtractorModel& model, nn::AdamW& opt,
                           const std::vector<const TrainItem*>& batch,
                           const TrainConfig& cfg, Rng& rng);

struct FitResult {
  std::string best_checkpoint;
  std::string last_checkpoint;
  double best_val_sisdri = 0;
  LossBreakdown first_step, last_step;
};

// Full loop: per-step CSV log, periodic three-scenario validation SI-SDRi,
// best/last checkpoints (atomic writes). Resuming from `resume_path`
// reproduces the same step sequence (per-step RNG is derived from
// cfg.seed and the step index).
FitResult Fit(ExtractorModel& model, const std::vector<TrainItem>& train_items,
              const std::vector<TrainItem>& val_items, const TrainConfig& cfg,
              const std::string& out_dir, const std::string& resume_path = "");

// Validation helper: mean SI-SDRi for the three scenario types.
struct ScenarioSiSdri {
  double nominal = 0, rnd_doa = 0, rnd_ref = 0;
  double mean() const { return (nominal + rnd_doa + rnd_ref) / 3.0; }
};
ScenarioSiSdri EvaluateScenarios(ExtractorModel& model,
                                 const std::vector<TrainItem>& items,
                                 uint64_t seed);

// ---- DOA estimator training ----

// Multi-hot grid target: ones at the two speaker bins, zeros elsewhere
// (including the noise direction).
nn::Tensor MakeDoaTarget(const RoomScene& scene);

struct DoaTrainItem {
  nn::Tensor mix_ri;  // (2J, K, T), precomputed analysis features
  nn::Tensor target;  // [91]
};

// BCE summed over bins, averaged over the batch; one update.
double DoaTrainingStep(DoaNet& model, nn::AdamW& opt,
                       const std::vector<const DoaTrainItem*>& batch);

struct DoaFitResult {
  std::string checkpoint;
  double first_loss = 0, last_loss = 0;
};

DoaFitResult FitDoa(DoaNet& model, const std::vector<DoaTrainItem>& items,
                    double lr, int batch_size, int max_steps, uint64_t seed,
                    const std::string& out_dir);

}  // namespace tsx

#endif  // TSX_TRAIN_TRAINER_H_

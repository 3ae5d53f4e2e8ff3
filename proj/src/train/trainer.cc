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

#include "train/trainer.h"

#include <filesystem>
#include <fstream>

#include "dsp/metrics.h"

namespace fs = std::filesystem;

namespace tsx {

TrainRecipe ParseTrainRecipe(const std::string& name) {
  if (name == "proposed") return TrainRecipe::kProposed;
  if (name == "no_3b") return TrainRecipe::kNo3b;
  if (name == "spectral_only") return TrainRecipe::kSpectralOnly;
  if (name == "spatial_only") return TrainRecipe::kSpatialOnly;
  throw Error("train", "unknown recipe '" + name +
                           "' (expected proposed, no_3b, spectral_only, or "
                           "spatial_only)");
}

std::string TrainRecipeName(TrainRecipe r) {
  switch (r) {
    case TrainRecipe::kProposed: return "proposed";
    case TrainRecipe::kNo3b: return "no_3b";
    case TrainRecipe::kSpectralOnly: return "spectral_only";
    case TrainRecipe::kSpatialOnly: return "spatial_only";
  }
  throw Error("train", "invalid recipe value");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"lr", lr},
          {"batch_size", batch_size},
          {"ce_weight", ce_weight},
          {"weight_decay", weight_decay},
          {"grad_clip", grad_clip},
          {"max_steps", max_steps},
          {"val_interval", val_interval},
          {"seed", seed},
          {"recipe", TrainRecipeName(recipe)}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.ce_weight = j.value("ce_weight", c.ce_weight);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.val_interval = j.value("val_interval", c.val_interval);
  c.seed = j.value("seed", c.seed);
  if (j.contains("recipe")) c.recipe = ParseTrainRecipe(j.at("recipe"));
  TSX_CHECK(c.lr > 0 && c.batch_size >= 1 && c.max_steps >= 1, "train",
            "invalid training config");
  return c;
}

int PerturbDoa(int theta_d_deg, Rng& rng) {
  TSX_CHECK(theta_d_deg >= 0 && theta_d_deg <= 180 && theta_d_deg % 2 == 0,
            "perturb-doa", "DOA " << theta_d_deg << " is off the grid");
  static constexpr int kDeltas[5] = {-4, -2, 0, 2, 4};
  const int delta = kDeltas[rng.UniformInt(0, 4)];
  return std::clamp(theta_d_deg + delta, 0, 180);
}

namespace {

nn::Tensor WaveToTensor(const Wave& w) {
  nn::Tensor t({static_cast<int>(w.size())});
  for (Eigen::Index i = 0; i < w.size(); ++i) t.data[i] = w[i];
  return t;
}

struct ScenarioSpec {
  const Wave* ref;
  int theta_deg;
  int label;
};

// Builds the recipe's scenario list for one item. The RNG draw order (one
// PerturbDoa per perturbed scenario, in list order) is part of the trained
// models' reproducibility contract.
std::vector<ScenarioSpec> MakeScenarioSpecs(const TrainItem& item,
                                            TrainRecipe recipe, Rng& rng,
                                            Wave* noise_ref) {
  const EnrollmentBundle& b = item.bundle;
  std::vector<ScenarioSpec> scenarios;
  switch (recipe) {
    case TrainRecipe::kProposed:
      scenarios.push_back({&b.spectral_ref, PerturbDoa(b.doa_deg, rng), 0});
      scenarios.push_back({&b.spectral_ref, b.doa_rnd_deg, 2});
      scenarios.push_back({&b.spectral_rnd, PerturbDoa(b.doa_deg, rng), 1});
      break;
    case TrainRecipe::kNo3b:
      scenarios.push_back({&b.spectral_ref, PerturbDoa(b.doa_deg, rng), 0});
      break;
    case TrainRecipe::kSpectralOnly:
      scenarios.push_back(
          {&b.spectral_ref, 2 * static_cast<int>(rng.UniformInt(0, 90)), 2});
      break;
    case TrainRecipe::kSpatialOnly:
      *noise_ref = GaussianNoise(item.example.target_reverb.size(), rng.Next());
      scenarios.push_back({noise_ref, PerturbDoa(b.doa_deg, rng), 1});
      break;
  }
  return scenarios;
}

}  // namespace

LossBreakdown TrainingStep(ExtractorModel& model, nn::AdamW& opt,
                           const std::vector<const TrainItem*>& batch,
                           const TrainConfig& cfg, Rng& rng) {
  TSX_CHECK(!batch.empty(), "train", "empty batch");
  nn::ParamStore& ps = model.params();
  ps.ZeroGrads();

  LossBreakdown bd;
  int cls_correct = 0, cls_total = 0;
  const double bscale = 1.0 / batch.size();

  for (const TrainItem* item : batch) {
    Wave noise_ref;  // storage for the spatial-only Gaussian reference
    const std::vector<ScenarioSpec> scenarios =
        MakeScenarioSpecs(*item, cfg.recipe, rng, &noise_ref);
    const int nsc = static_cast<int>(scenarios.size());
    const nn::Tensor target = WaveToTensor(item->example.target_reverb);
    const RiSpectrogram mix_spec = model.stft().Forward(item->example.mixture);

    for (const ScenarioSpec& sc : scenarios) {
      const RiSpectrogram enr_spec = model.stft().Forward(*sc.ref);
      nn::Tape t;
      ExtractorModel::Forward f =
          model.Run(t, mix_spec.data, enr_spec.data, sc.theta_deg);
      nn::Var neg_sisdr = nn::NegSiSdrLoss(t, f.estimate, target);
      nn::Var ce = nn::CrossEntropyLogits(t, f.class_logits, sc.label);
      nn::Var loss = nn::Add(t, nn::Scale(t, neg_sisdr, bscale),
                             nn::Scale(t, ce, cfg.ce_weight * bscale / nsc));
      const double lv = t.val(loss).data[0];
      TSX_CHECK(std::isfinite(lv), "train",
                "non-finite loss (scene seed " << item->example.scene.seed
                    << ", theta " << sc.theta_deg << ", label " << sc.label
                    << ")");
      t.Backward(loss);

      const double term = t.val(neg_sisdr).data[0] * bscale;
      if (sc.label == 0) bd.sisdr_nominal += term;
      else if (sc.label == 2) bd.sisdr_rnd_doa += term;
      else bd.sisdr_rnd_ref += term;
      bd.ce += t.val(ce).data[0] * bscale / nsc;

      const nn::Tensor& z = t.val(f.class_logits);
      int argmax = 0;
      for (int i = 1; i < z.dim(0); ++i)
        if (z.data[i] > z.data[argmax]) argmax = i;
      cls_correct += argmax == sc.label ? 1 : 0;
      ++cls_total;
    }
  }

  TSX_CHECK(ps.GradsFinite(), "train", "non-finite gradients");
  if (cfg.grad_clip > 0) ps.ClipGradNorm(cfg.grad_clip);
  opt.Step();

  bd.total = bd.sisdr_nominal + bd.sisdr_rnd_doa + bd.sisdr_rnd_ref +
             cfg.ce_weight * bd.ce;
  bd.classifier_accuracy = static_cast<double>(cls_correct) / cls_total;
  return bd;
}

ScenarioSiSdri EvaluateScenarios(ExtractorModel& model,
                                 const std::vector<TrainItem>& items,
                                 uint64_t seed) {
  TSX_CHECK(!items.empty(), "eval", "no validation items");
  ScenarioSiSdri r;
  for (const TrainItem& item : items) {
    const Wave mix1 = item.example.mixture.channel(0);
    const Wave& tgt = item.example.target_reverb;
    const EnrollmentBundle& b = item.bundle;
    r.nominal += SiSdrImprovement(
        model.Extract(item.example.mixture, b.spectral_ref, b.doa_deg), mix1, tgt);
    r.rnd_doa += SiSdrImprovement(
        model.Extract(item.example.mixture, b.spectral_ref, b.doa_rnd_deg),
        mix1, tgt);
    r.rnd_ref += SiSdrImprovement(
        model.Extract(item.example.mixture, b.spectral_rnd, b.doa_deg), mix1,
        tgt);
  }
  (void)seed;
  r.nominal /= items.size();
  r.rnd_doa /= items.size();
  r.rnd_ref /= items.size();
  return r;
}

namespace {

void AtomicSave(ExtractorModel& model, const nn::AdamW* opt,
                const nlohmann::json& meta, const std::string& path) {
  const std::string tmp = path + ".tmp";
  model.Save(tmp, opt, meta);
  fs::rename(tmp, path);
}

}  // namespace

FitResult Fit(ExtractorModel& model, const std::vector<TrainItem>& train_items,
              const std::vector<TrainItem>& val_items, const TrainConfig& cfg,
              const std::string& out_dir, const std::string& resume_path) {
  TSX_CHECK(!train_items.empty(), "train", "no training items");
  fs::create_directories(out_dir);
  nn::AdamW opt(&model.params(),
                {cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  int start_step = 0;
  if (!resume_path.empty()) {
    model.Load(resume_path, &opt);
    start_step = static_cast<int>(opt.step_count());
  }

  const std::string log_path = (fs::path(out_dir) / "train_log.csv").string();
  std::ofstream log(log_path, start_step > 0 ? std::ios::app : std::ios::out);
  if (start_step == 0)
    log << "step,sisdr_nominal,sisdr_rnd_doa,sisdr_rnd_ref,ce,total,"
           "classifier_accuracy\n";
  const std::string val_path = (fs::path(out_dir) / "val_log.csv").string();
  std::ofstream val_log(val_path, start_step > 0 ? std::ios::app : std::ios::out);
  if (start_step == 0)
    val_log << "step,val_sisdri_nominal,val_sisdri_rnd_doa,val_sisdri_rnd_ref,"
               "val_sisdri_mean\n";

  FitResult res;
  res.best_val_sisdri = -1e30;
  res.best_checkpoint = (fs::path(out_dir) / "best.ckpt").string();
  res.last_checkpoint = (fs::path(out_dir) / "last.ckpt").string();
  nlohmann::json meta{{"train_config", cfg.ToJson()}};

  Rng seeder(cfg.seed ^ 0xf17a11ULL);
  for (int step = start_step; step < cfg.max_steps; ++step) {
    Rng srng = seeder.Fork(step);
    std::vector<const TrainItem*> batch;
    for (int i = 0; i < cfg.batch_size; ++i)
      batch.push_back(&train_items[srng.UniformInt(
          0, static_cast<int64_t>(train_items.size()) - 1)]);
    const LossBreakdown bd = TrainingStep(model, opt, batch, cfg, srng);
    log << step << "," << bd.sisdr_nominal << "," << bd.sisdr_rnd_doa << ","
        << bd.sisdr_rnd_ref << "," << bd.ce << "," << bd.total << ","
        << bd.classifier_accuracy << "\n";
    log.flush();
    if (step == start_step) res.first_step = bd;
    res.last_step = bd;

    const bool last = step + 1 == cfg.max_steps;
    if (cfg.val_interval > 0 && !val_items.empty() &&
        ((step + 1) % cfg.val_interval == 0 || last)) {
      const ScenarioSiSdri v = EvaluateScenarios(model, val_items, cfg.seed);
      val_log << step << "," << v.nominal << "," << v.rnd_doa << ","
              << v.rnd_ref << "," << v.mean() << "\n";
      val_log.flush();
      meta["step"] = step + 1;
      if (v.mean() > res.best_val_sisdri) {
        res.best_val_sisdri = v.mean();
        AtomicSave(model, &opt, meta, res.best_checkpoint);
      }
      AtomicSave(model, &opt, meta, res.last_checkpoint);
    } else if (last) {
      meta["step"] = step + 1;
      AtomicSave(model, &opt, meta, res.last_checkpoint);
      if (cfg.val_interval == 0 || val_items.empty()) {
        res.best_checkpoint = res.last_checkpoint;
      }
    }
  }
  return res;
}

nn::Tensor MakeDoaTarget(const RoomScene& scene) {
  nn::Tensor t({kDoaGridBins});
  t.data[DoaToBin(scene.desired_doa_deg)] = 1.0;
  t.data[DoaToBin(scene.interferer_doa_deg)] = 1.0;
  return t;
}

double DoaTrainingStep(DoaNet& model, nn::AdamW& opt,
                       const std::vector<const DoaTrainItem*>& batch) {
  TSX_CHECK(!batch.empty(), "train-doa", "empty batch");
  model.params().ZeroGrads();
  const double bscale = 1.0 / batch.size();
  double total = 0;
  for (const DoaTrainItem* item : batch) {
    nn::Tape t;
    nn::Var logits = model.Run(t, item->mix_ri);
    nn::Var loss =
        nn::Scale(t, nn::BceWithLogits(t, logits, item->target), bscale);
    const double lv = t.val(loss).data[0];
    TSX_CHECK(std::isfinite(lv), "train-doa", "non-finite loss");
    t.Backward(loss);
    total += lv;
  }
  TSX_CHECK(model.params().GradsFinite(), "train-doa", "non-finite gradients");
  opt.Step();
  return total;
}

DoaFitResult FitDoa(DoaNet& model, const std::vector<DoaTrainItem>& items,
                    double lr, int batch_size, int max_steps, uint64_t seed,
                    const std::string& out_dir) {
  TSX_CHECK(!items.empty(), "train-doa", "no training items");
  fs::create_directories(out_dir);
  nn::AdamW opt(&model.params(), {lr, 0.9, 0.999, 1e-8, 1e-2});
  std::ofstream log((fs::path(out_dir) / "doa_log.csv").string());
  log << "step,bce\n";
  DoaFitResult res;
  Rng seeder(seed ^ 0xd0aULL);
  for (int step = 0; step < max_steps; ++step) {
    Rng srng = seeder.Fork(step);
    std::vector<const DoaTrainItem*> batch;
    for (int i = 0; i < batch_size; ++i)
      batch.push_back(
          &items[srng.UniformInt(0, static_cast<int64_t>(items.size()) - 1)]);
    const double loss = DoaTrainingStep(model, opt, batch);
    log << step << "," << loss << "\n";
    if (step == 0) res.first_loss = loss;
    res.last_loss = loss;
  }
  res.checkpoint = (fs::path(out_dir) / "doa.ckpt").string();
  const std::string tmp = res.checkpoint + ".tmp";
  model.Save(tmp, &opt,
             {{"steps", max_steps}, {"lr", lr}, {"seed", seed}});
  fs::rename(tmp, res.checkpoint);
  return res;
}

}  // namespace tsx

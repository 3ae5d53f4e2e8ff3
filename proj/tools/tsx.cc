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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "data/manifest.h"
#include "data/testset.h"
#include "dsp/wav.h"
#include "eval/evaluate.h"
#include "infer/matching.h"
#include "train/trainer.h"
#include "util/error.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsx;

namespace {

// TSX_OUT_DIR, when set, overrides every output-directory flag.
std::string ResolveOutDir(const std::string& flag_value) {
  if (const char* env = std::getenv("TSX_OUT_DIR"); env && *env) return env;
  return flag_value;
}

json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  TSX_CHECK(in.good(), "cli", "cannot read " << path);
  json j;
  in >> j;
  return j;
}

void WriteJsonFile(const std::string& path, const json& j) {
  std::ofstream out(path);
  TSX_CHECK(out.good(), "cli", "cannot write " << path);
  out << j.dump(2) << "\n";
}

SceneConfig LoadSceneConfig(const std::string& path) {
  if (path.empty()) return SceneConfig();
  return SceneConfig::FromJson(LoadJsonFile(path));
}

std::vector<TrainItem> ItemsFromManifest(const Manifest& m,
                                         const std::string& split,
                                         const SpeakerCorpus* mirror_corpus =
                                             nullptr) {
  std::vector<TrainItem> items;
  for (const ManifestRecord& rec : m.Split(split)) {
    TrainItem it;
    MakeTrainingExample(rec, m.scene_config, &it.example, &it.bundle);
    items.push_back(std::move(it));
    if (mirror_corpus != nullptr) {
      TrainItem mirror;
      MakeMirroredTrainingExample(rec, m.scene_config, *mirror_corpus,
                                  &mirror.example, &mirror.bundle);
      items.push_back(std::move(mirror));
    }
  }
  return items;
}

int RunSynthesize(const std::string& out_flag, const std::string& corpus_root,
                  const std::string& scene_cfg_path, const std::string& split,
                  int speakers, int utts, double seconds, int n_train,
                  int n_val, int n_test, uint64_t seed) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  SpeakerCorpus corpus =
      corpus_root.empty()
          ? GenerateSyntheticCorpus(out + "/corpus", speakers, utts, seconds,
                                    seed)
          : ScanCorpus({corpus_root});
  if (!split.empty()) {
    // Restrict generation to the listed splits.
    if (split.find("train") == std::string::npos) n_train = 0;
    if (split.find("val") == std::string::npos) n_val = 0;
    if (split.find("test") == std::string::npos) n_test = 0;
  }
  const SceneConfig cfg = LoadSceneConfig(scene_cfg_path);
  Manifest m = BuildManifest(corpus, {}, n_train, n_val, n_test, seed, cfg);
  const std::string manifest_path = out + "/manifest.jsonl";
  m.Save(manifest_path);
  json j;
  j["manifest"] = manifest_path;
  j["speakers"] = corpus.speakers.size();
  j["records"] = {{"train", n_train}, {"val", n_val}, {"test", n_test}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int RunTrain(const std::string& config_path, const std::string& train_manifest,
             const std::string& val_manifest, const std::string& out_flag,
             const std::string& resume, const std::string& mirror_corpus) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  json cfg_json =
      config_path.empty() ? json::object() : LoadJsonFile(config_path);
  ModelConfig mcfg = cfg_json.contains("model")
                         ? ModelConfig::FromJson(cfg_json["model"])
                         : ModelConfig();
  TrainConfig tcfg = cfg_json.contains("train")
                         ? TrainConfig::FromJson(cfg_json["train"])
                         : TrainConfig();
  const Manifest tm = Manifest::LoadFile(train_manifest);
  SpeakerCorpus corpus;
  if (!mirror_corpus.empty()) corpus = ScanCorpus({mirror_corpus});
  std::vector<TrainItem> train_items = ItemsFromManifest(
      tm, "train", mirror_corpus.empty() ? nullptr : &corpus);
  std::vector<TrainItem> val_items;
  if (!val_manifest.empty()) {
    const Manifest vm = Manifest::LoadFile(val_manifest);
    val_items = ItemsFromManifest(vm, "val");
  }
  ExtractorModel model(mcfg);
  const FitResult res = Fit(model, train_items, val_items, tcfg, out, resume);
  json j;
  j["best_checkpoint"] = res.best_checkpoint;
  j["last_checkpoint"] = res.last_checkpoint;
  j["best_val_sisdri_db"] = res.best_val_sisdri;
  j["first_step_loss"] = res.first_step.total;
  j["last_step_loss"] = res.last_step.total;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int RunTrainDoa(const std::string& config_path, const std::string& manifest,
                const std::string& out_flag, double lr, int batch, int steps,
                uint64_t seed) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  DoaConfig dcfg = config_path.empty()
                       ? DoaConfig()
                       : DoaConfig::FromJson(LoadJsonFile(config_path));
  DoaNet model(dcfg);
  const StftEngine& engine = model.stft();
  const Manifest m = Manifest::LoadFile(manifest);
  std::vector<DoaTrainItem> items;
  for (const ManifestRecord& rec : m.Split("train")) {
    MixtureExample ex;
    EnrollmentBundle bundle;
    MakeTrainingExample(rec, m.scene_config, &ex, &bundle);
    DoaTrainItem it;
    it.mix_ri = engine.Forward(ex.mixture).data;
    it.target = MakeDoaTarget(ex.scene);
    items.push_back(std::move(it));
  }
  const DoaFitResult res = FitDoa(model, items, lr, batch, steps, seed, out);
  json j;
  j["checkpoint"] = res.checkpoint;
  j["first_loss"] = res.first_loss;
  j["last_loss"] = res.last_loss;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int RunEstimateDoa(const std::string& input, const std::string& model_path,
                   const std::string& out_path) {
  auto model = DoaNet::FromCheckpoint(model_path);
  const MultiWave mix = ReadWav(input);
  const std::vector<double> probs = model->Probs(mix);
  const DoaPick pick = PickTwoDoas(probs);
  json j;
  j["probs"] = probs;
  j["picked"] = {pick.theta_a, pick.theta_b};
  j["fallback"] = pick.fallback;
  j["checkpoint"] = nn::FileFingerprint(model_path);
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    WriteJsonFile(out_path, j);
  return 0;
}

int RunExtract(const std::string& mixture_path, const std::string& ref1_path,
               const std::string& ref2_path, const std::string& model_path,
               const std::string& doa_model_path, int theta,
               const std::string& out_flag, bool debug, uint64_t seed) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  auto model = ExtractorModel::FromCheckpoint(model_path);
  const MultiWave mix = ReadWav(mixture_path);
  const Wave ref1 = ReadWav(ref1_path).channel(0);
  json report;
  report["mixture"] = mixture_path;
  report["checkpoint"] = nn::FileFingerprint(model_path);
  report["seed"] = seed;

  if (!ref2_path.empty()) {
    TSX_CHECK(!doa_model_path.empty(), "cli",
              "--ref2 needs --doa-model for the matching pipeline");
    auto doa = DoaNet::FromCheckpoint(doa_model_path);
    const Wave ref2 = ReadWav(ref2_path).channel(0);
    const ExtractAllResult r = ExtractAll(*model, *doa, mix, ref1, ref2, seed);
    WriteWav(out + "/out1.wav", r.out1, kSampleRate);
    WriteWav(out + "/out2.wav", r.out2, kSampleRate);
    report["doa_checkpoint"] = nn::FileFingerprint(doa_model_path);
    report["estimated_doas"] = {r.pick.theta_a, r.pick.theta_b};
    report["doa_fallback"] = r.pick.fallback;
    report["pairing"] = {{"swapped", r.match.swapped},
                         {"tie", r.match.tie},
                         {"score_straight_db", r.match.score_straight},
                         {"score_swapped_db", r.match.score_swapped}};
    report["theta_for_ref1"] = r.theta_for_ref1;
    report["theta_for_ref2"] = r.theta_for_ref2;
    report["outputs"] = {out + "/out1.wav", out + "/out2.wav"};
    if (debug) {
      WriteWav(out + "/debug_spatial1.wav", r.match.spatial1, kSampleRate);
      WriteWav(out + "/debug_spatial2.wav", r.match.spatial2, kSampleRate);
      WriteWav(out + "/debug_spectral1.wav", r.match.spectral1, kSampleRate);
      WriteWav(out + "/debug_spectral2.wav", r.match.spectral2, kSampleRate);
    }
  } else {
    TSX_CHECK(theta >= 0 && theta <= 180 && theta % 2 == 0, "cli",
              "single-target extraction needs --theta on the 2-degree grid");
    std::vector<double> probs;
    const Wave est = model->Extract(mix, ref1, theta, &probs);
    WriteWav(out + "/out1.wav", est, kSampleRate);
    report["theta_deg"] = theta;
    report["class_probs"] = probs;
    report["outputs"] = {out + "/out1.wav"};
  }
  WriteJsonFile(out + "/extract_report.json", report);
  std::cout << report.dump(2) << "\n";
  return 0;
}

int RunEvaluate(const std::string& testset, const std::string& variant,
                const std::string& model_path,
                const std::string& doa_model_path,
                const std::string& corpus_root,
                const std::string& scene_cfg_path, int size, uint64_t seed,
                const std::string& out_flag) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  const TestConfig cfg = ParseTestConfig(testset);
  const EvalVariant var = ParseEvalVariant(variant);
  auto model = ExtractorModel::FromCheckpoint(model_path);
  std::unique_ptr<DoaNet> doa;
  if (!doa_model_path.empty()) doa = DoaNet::FromCheckpoint(doa_model_path);
  const SpeakerCorpus corpus = ScanCorpus({corpus_root});
  const SceneConfig base = LoadSceneConfig(scene_cfg_path);
  const std::vector<TestExample> set =
      MakeTestSet(cfg, size, seed, corpus, base);
  const EvalReport rep =
      EvaluateTestset(*model, doa.get(), set, cfg, var, seed,
                      nn::FileFingerprint(model_path));
  const std::string stem =
      out + "/eval_" + TestConfigName(cfg) + "_" + variant;
  rep.WriteCsv(stem + ".csv");
  rep.WriteJson(stem + ".json");
  json j;
  j["csv"] = stem + ".csv";
  j["json"] = stem + ".json";
  j["skipped"] = rep.skipped;
  if (!rep.skipped) {
    j["mean_sisdri_db"] = rep.MeanSiSdri();
    j["median_sisdri_db"] = rep.MedianSiSdri();
    j["mean_unprocessed_sisdr_db"] = rep.MeanUnprocessedSiSdr();
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int RunSweep(const std::string& model_path, const std::string& corpus_root,
             double rt60, uint64_t seed, const std::string& out_flag) {
  const std::string out = ResolveOutDir(out_flag);
  fs::create_directories(out);
  auto model = ExtractorModel::FromCheckpoint(model_path);
  const SpeakerCorpus corpus = ScanCorpus({corpus_root});
  const SweepScene scene = MakeSweepScene(corpus, seed, rt60);
  const SweepResult res = SweepTheta(*model, scene);
  res.WriteCsv(out + "/sweep.csv");
  WriteSweepSvg(out + "/sweep.svg", res,
                "enrollment-angle sweep (speakers at 54 and 122 deg)");
  json j;
  j["csv"] = out + "/sweep.csv";
  j["svg"] = out + "/sweep.svg";
  j["checkpoint"] = nn::FileFingerprint(model_path);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsx: multichannel target-speaker extraction toolkit"};
  app.require_subcommand(1);

  // synthesize
  auto* syn = app.add_subcommand(
      "synthesize", "Generate a synthetic corpus and a mixture manifest");
  std::string syn_out, syn_corpus, syn_cfg, syn_split;
  int syn_speakers = 12, syn_utts = 3, syn_train = 64, syn_val = 16,
      syn_test = 16;
  double syn_seconds = 5.0;
  uint64_t syn_seed = 0;
  syn->add_option("--out", syn_out, "Output directory")->required();
  syn->add_option("--corpus-root", syn_corpus,
                  "Existing corpus root (skips synthesis)");
  syn->add_option("--config", syn_cfg, "Scene config JSON file");
  syn->add_option("--split", syn_split,
                  "Comma list of splits to generate (default all)");
  syn->add_option("--speakers", syn_speakers, "Synthetic speakers");
  syn->add_option("--utts", syn_utts, "Utterances per speaker");
  syn->add_option("--seconds", syn_seconds, "Utterance length (s)");
  syn->add_option("--train", syn_train, "Train records");
  syn->add_option("--val", syn_val, "Val records");
  syn->add_option("--test", syn_test, "Test records");
  syn->add_option("--seed", syn_seed, "RNG seed");

  // train
  auto* tr = app.add_subcommand("train", "Train the extraction network");
  std::string tr_cfg, tr_train, tr_val, tr_out, tr_resume, tr_mirror;
  tr->add_option("--config", tr_cfg,
                 "JSON with optional \"model\" and \"train\" objects");
  tr->add_option("--train-manifest", tr_train, "Training manifest")
      ->required();
  tr->add_option("--val-manifest", tr_val, "Validation manifest");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--resume", tr_resume, "Checkpoint to resume from");
  tr->add_option("--mirror-corpus", tr_mirror,
                 "Corpus root; adds a role-swapped view of every record");

  // train-doa
  auto* td = app.add_subcommand("train-doa", "Train the DOA estimator");
  std::string td_cfg, td_manifest, td_out;
  double td_lr = 1e-3;
  int td_batch = 8, td_steps = 300;
  uint64_t td_seed = 0;
  td->add_option("--config", td_cfg, "DOA config JSON file");
  td->add_option("--manifest", td_manifest, "Training manifest")->required();
  td->add_option("--out", td_out, "Output directory")->required();
  td->add_option("--lr", td_lr, "Learning rate");
  td->add_option("--batch", td_batch, "Batch size");
  td->add_option("--steps", td_steps, "Optimizer steps");
  td->add_option("--seed", td_seed, "RNG seed");

  // estimate-doa
  auto* ed = app.add_subcommand("estimate-doa",
                                "Per-bin DOA probabilities for a mixture");
  std::string ed_input, ed_model, ed_out;
  ed->add_option("--input", ed_input, "4-channel mixture WAV")->required();
  ed->add_option("--model", ed_model, "DOA checkpoint")->required();
  ed->add_option("--out", ed_out, "Output JSON (default stdout)");

  // extract
  auto* ex = app.add_subcommand("extract", "Extract target speaker(s)");
  std::string ex_mix, ex_ref1, ex_ref2, ex_model, ex_doa, ex_out;
  int ex_theta = -1;
  bool ex_debug = false;
  uint64_t ex_seed = 0;
  ex->add_option("--mixture", ex_mix, "4-channel mixture WAV")->required();
  ex->add_option("--ref1", ex_ref1, "Spectral enrollment WAV")->required();
  ex->add_option("--ref2", ex_ref2,
                 "Second enrollment (enables DOA matching)");
  ex->add_option("--model", ex_model, "Extractor checkpoint")->required();
  ex->add_option("--doa-model", ex_doa, "DOA checkpoint (with --ref2)");
  ex->add_option("--theta", ex_theta, "Enrollment DOA (without --ref2)");
  ex->add_option("--out-dir", ex_out, "Output directory")->required();
  ex->add_flag("--debug", ex_debug, "Persist intermediate extractions");
  ex->add_option("--seed", ex_seed, "RNG seed");

  // evaluate
  auto* ev = app.add_subcommand("evaluate",
                                "Evaluate a checkpoint on a test config");
  std::string ev_testset, ev_variant = "proposed", ev_model, ev_doa,
              ev_corpus, ev_cfg, ev_out;
  int ev_size = 50;
  uint64_t ev_seed = 0;
  ev->add_option("--testset", ev_testset,
                 "CSP | MSP | SGM | SGM-RDR | SGM-RSR | SGM-LSSE")
      ->required();
  ev->add_option("--variant", ev_variant,
                 "spectral_only | spatial_only | proposed | proposed_no_3b | "
                 "proposed_doa_inference");
  ev->add_option("--model", ev_model, "Extractor checkpoint")->required();
  ev->add_option("--doa-model", ev_doa, "DOA checkpoint");
  ev->add_option("--corpus", ev_corpus, "Corpus root")->required();
  ev->add_option("--scene-config", ev_cfg, "Scene config JSON file");
  ev->add_option("--size", ev_size, "Examples per config");
  ev->add_option("--seed", ev_seed, "RNG seed");
  ev->add_option("--out-dir", ev_out, "Output directory")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Enrollment-angle sweep experiment");
  std::string sw_model, sw_corpus, sw_out;
  double sw_rt60 = 0.25;
  uint64_t sw_seed = 0;
  sw->add_option("--model", sw_model, "Extractor checkpoint")->required();
  sw->add_option("--corpus", sw_corpus, "Corpus root")->required();
  sw->add_option("--rt60", sw_rt60, "Scene RT60 (s)");
  sw->add_option("--seed", sw_seed, "RNG seed");
  sw->add_option("--out-dir", sw_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (syn->parsed())
      return RunSynthesize(syn_out, syn_corpus, syn_cfg, syn_split,
                           syn_speakers, syn_utts, syn_seconds, syn_train,
                           syn_val, syn_test, syn_seed);
    if (tr->parsed())
      return RunTrain(tr_cfg, tr_train, tr_val, tr_out, tr_resume, tr_mirror);
    if (td->parsed())
      return RunTrainDoa(td_cfg, td_manifest, td_out, td_lr, td_batch,
                         td_steps, td_seed);
    if (ed->parsed()) return RunEstimateDoa(ed_input, ed_model, ed_out);
    if (ex->parsed())
      return RunExtract(ex_mix, ex_ref1, ex_ref2, ex_model, ex_doa, ex_theta,
                        ex_out, ex_debug, ex_seed);
    if (ev->parsed())
      return RunEvaluate(ev_testset, ev_variant, ev_model, ev_doa, ev_corpus,
                         ev_cfg, ev_size, ev_seed, ev_out);
    if (sw->parsed())
      return RunSweep(sw_model, sw_corpus, sw_rt60, sw_seed, sw_out);
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}

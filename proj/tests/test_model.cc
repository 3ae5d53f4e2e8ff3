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

#include <cmath>

#include "doctest.h"

#include "model/doa_net.h"
#include "model/extractor.h"
#include "test_util.h"

using namespace tsx;
using testutil::RandomWave;
using testutil::TempDir;

namespace {

ModelConfig TinyConfig() {
  ModelConfig cfg;
  cfg.encoder_channels = {2, 3, 4, 4, 6, 6};
  cfg.bottleneck_dim = 16;
  cfg.attention_heads = 2;
  return cfg;
}

MultiWave RandomMix(int64_t samples, uint64_t seed) {
  MultiWave m;
  m.sample_rate = 8000;
  m.samples.resize(4, samples);
  Rng rng(seed);
  for (int c = 0; c < 4; ++c)
    for (int64_t i = 0; i < samples; ++i) m.samples(c, i) = 0.1 * rng.Normal();
  return m;
}

}  // namespace

TEST_CASE("config: frequency chain and validation") {
  ModelConfig cfg = TinyConfig();
  const auto fs = cfg.FreqSizes();
  REQUIRE(fs.size() == 7);
  CHECK(fs[0] == 129);
  CHECK(fs[6] == 3);
  for (size_t i = 1; i < fs.size(); ++i) CHECK(fs[i] == (fs[i - 1] - 1) / 2 + 1);

  ModelConfig bad = cfg;
  bad.encoder_channels = {4, 4, 4, 4, 4, 4, 4};  // more stages than bins allow
  CHECK_THROWS(bad.Validate());
  bad = cfg;
  bad.bottleneck_dim = 15;  // not divisible by heads
  CHECK_THROWS(bad.Validate());
  bad = cfg;
  bad.doa_bins = 90;
  CHECK_THROWS(bad.Validate());

  const ModelConfig rt = ModelConfig::FromJson(cfg.ToJson());
  CHECK(rt.ToJson() == cfg.ToJson());
}

TEST_CASE("extractor: output shapes across frame counts 1, 17, 249") {
  ExtractorModel model(TinyConfig());
  const StftEngine& engine = model.stft();
  const MultiWave enroll_src = RandomMix(32000, 1);
  const nn::Tensor enroll_ri = engine.Forward(enroll_src.channel(0)).data;
  for (int frames : {1, 17, 249}) {
    const int64_t samples = engine.config().NumSamples(frames);
    const nn::Tensor mix_ri = engine.Forward(RandomMix(samples, frames)).data;
    REQUIRE(mix_ri.dim(2) == frames);
    nn::Tape t;
    const auto fwd = model.Run(t, mix_ri, enroll_ri, 60, /*training=*/false);
    CHECK(t.val(fwd.estimate).numel() == samples);
    CHECK(t.val(fwd.class_logits).numel() == 3);
    CHECK(t.val(fwd.emb_x).dim(0) == frames);
    CHECK(t.val(fwd.emb_x).dim(1) == 16);
  }
}

TEST_CASE("extractor: first-pass conditioning is the identity at init") {
  ExtractorModel model(TinyConfig());
  const StftEngine& engine = model.stft();
  const nn::Tensor mix_ri = engine.Forward(RandomMix(2304, 2)).data;
  const nn::Tensor enroll_ri =
      engine.Forward(RandomWave(2304, 3, 0.1)).data;
  nn::Tape t;
  const auto fwd = model.Run(t, mix_ri, enroll_ri, 30);
  const nn::Tensor& film = t.val(fwd.film1);
  const nn::Tensor& emb = t.val(fwd.emb_x);
  REQUIRE(film.shape == emb.shape);
  for (int64_t i = 0; i < film.numel(); ++i)
    CHECK(film.data[i] == emb.data[i]);  // bit-for-bit
}

TEST_CASE("extractor: eval-mode extraction is deterministic") {
  ExtractorModel model(TinyConfig());
  const MultiWave mix = RandomMix(32000, 4);
  const Wave ref = RandomWave(32000, 5, 0.1);
  std::vector<double> p1, p2;
  const Wave a = model.Extract(mix, ref, 40, &p1);
  const Wave b = model.Extract(mix, ref, 40, &p2);
  REQUIRE(a.size() == 32000);
  for (int i = 0; i < 32000; ++i) CHECK(a[i] == b[i]);
  REQUIRE(p1.size() == 3);
  double sum = 0;
  for (size_t i = 0; i < 3; ++i) {
    CHECK(p1[i] == p2[i]);
    CHECK(p1[i] >= 0.0);
    sum += p1[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("extractor: output depends on both enrollment cues") {
  ExtractorModel model(TinyConfig());
  // Break the FiLM identity so the conditioning path is live.
  Rng rng(99);
  for (auto& [name, e] : model.params().params())
    for (double& v : e.value.data) v += 0.02 * rng.Normal();
  const MultiWave mix = RandomMix(32000, 6);
  const Wave ref_a = RandomWave(32000, 7, 0.1);
  const Wave ref_b = RandomWave(32000, 8, 0.1);
  const Wave base = model.Extract(mix, ref_a, 40);
  const Wave other_ref = model.Extract(mix, ref_b, 40);
  const Wave other_doa = model.Extract(mix, ref_a, 120);
  double d_ref = 0, d_doa = 0;
  for (int i = 0; i < 32000; ++i) {
    d_ref += std::abs(base[i] - other_ref[i]);
    d_doa += std::abs(base[i] - other_doa[i]);
  }
  CHECK(d_ref > 0.0);
  CHECK(d_doa > 0.0);
}

TEST_CASE("extractor: enrollment embedding is frame-order invariant") {
  ExtractorModel model(TinyConfig());
  const StftEngine& engine = model.stft();
  const nn::Tensor mix_ri = engine.Forward(RandomMix(2304, 9)).data;
  nn::Tensor enroll = engine.Forward(RandomWave(2304, 10, 0.1)).data;
  const int frames = enroll.dim(2), bins = enroll.dim(1);

  nn::Tape t1;
  const auto f1 = model.Run(t1, mix_ri, enroll, 50);

  // Reverse the enrollment frames; mean pooling over a time-kernel-1 encoder
  // must produce the identical embedding, hence an identical estimate.
  nn::Tensor rev = enroll;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < bins; ++b)
      for (int f = 0; f < frames; ++f)
        rev.at(c, b, f) = enroll.at(c, b, frames - 1 - f);
  nn::Tape t2;
  const auto f2 = model.Run(t2, mix_ri, rev, 50);

  const nn::Tensor& e1 = t1.val(f1.estimate);
  const nn::Tensor& e2 = t2.val(f2.estimate);
  for (int64_t i = 0; i < e1.numel(); ++i)
    CHECK(e1.data[i] == doctest::Approx(e2.data[i]).epsilon(1e-12));
}

TEST_CASE("extractor: save/load round trip reproduces outputs exactly") {
  TempDir tmp("model");
  ExtractorModel model(TinyConfig());
  Rng rng(12);
  for (auto& [name, e] : model.params().params())
    for (double& v : e.value.data) v += 0.01 * rng.Normal();
  const MultiWave mix = RandomMix(32000, 13);
  const Wave ref = RandomWave(32000, 14, 0.1);
  const Wave before = model.Extract(mix, ref, 80);

  model.Save(tmp.file("m.ckpt"), nullptr);
  auto loaded = ExtractorModel::FromCheckpoint(tmp.file("m.ckpt"));
  CHECK(loaded->config().ToJson() == model.config().ToJson());
  const Wave after = loaded->Extract(mix, ref, 80);
  for (int i = 0; i < 32000; ++i) CHECK(after[i] == before[i]);
}

TEST_CASE("extractor: loading rejects an incompatible architecture") {
  TempDir tmp("modelbad");
  ExtractorModel model(TinyConfig());
  model.Save(tmp.file("m.ckpt"), nullptr);
  ModelConfig other = TinyConfig();
  other.bottleneck_dim = 32;
  ExtractorModel wrong(other);
  CHECK_THROWS(wrong.Load(tmp.file("m.ckpt")));
}

TEST_CASE("doa net: probability output and determinism") {
  DoaConfig cfg;
  cfg.encoder_channels = {2, 3, 4, 4, 6, 6};
  cfg.embed_dim = 16;
  DoaNet net(cfg);
  const MultiWave mix = RandomMix(32000, 20);
  const auto p1 = net.Probs(mix);
  const auto p2 = net.Probs(mix);
  REQUIRE(p1.size() == 91);
  for (size_t i = 0; i < 91; ++i) {
    CHECK(p1[i] >= 0.0);
    CHECK(p1[i] <= 1.0);
    CHECK(p1[i] == p2[i]);
  }
}

TEST_CASE("doa net: save/load round trip") {
  TempDir tmp("doa");
  DoaConfig cfg;
  cfg.encoder_channels = {2, 3, 4, 4, 6, 6};
  cfg.embed_dim = 16;
  DoaNet net(cfg);
  const MultiWave mix = RandomMix(32000, 21);
  const auto before = net.Probs(mix);
  net.Save(tmp.file("d.ckpt"), nullptr);
  auto loaded = DoaNet::FromCheckpoint(tmp.file("d.ckpt"));
  const auto after = loaded->Probs(mix);
  for (size_t i = 0; i < 91; ++i) CHECK(after[i] == before[i]);
}

TEST_CASE("pick-two-doas: exact peaks at bins 27 and 61") {
  std::vector<double> probs(91, 0.0);
  probs[27] = 0.9;
  probs[61] = 0.8;
  const DoaPick p = PickTwoDoas(probs);
  CHECK(p.theta_a == 54);
  CHECK(p.theta_b == 122);
  CHECK_FALSE(p.fallback);
}

TEST_CASE("pick-two-doas: suppression keeps one peak per cluster") {
  std::vector<double> probs(91, 0.0);
  probs[27] = 0.9;
  probs[28] = 0.85;  // leakage next to the true peak
  probs[61] = 0.8;
  const DoaPick p = PickTwoDoas(probs);
  CHECK((p.theta_a == 54 || p.theta_a == 56));
  CHECK(p.theta_b == 122);
  CHECK_FALSE(p.fallback);
}

TEST_CASE("pick-two-doas: uniform probabilities trigger the fallback") {
  std::vector<double> probs(91, 0.5);
  const DoaPick p = PickTwoDoas(probs);
  CHECK(p.fallback);
  CHECK(p.theta_a < p.theta_b);
}

TEST_CASE("pick-two-doas: ascending order regardless of magnitudes") {
  std::vector<double> probs(91, 0.0);
  probs[61] = 0.99;  // stronger peak at the larger angle
  probs[27] = 0.5;
  const DoaPick p = PickTwoDoas(probs);
  CHECK(p.theta_a == 54);
  CHECK(p.theta_b == 122);
}

TEST_CASE("pick-two-doas: picked peaks at least 6 degrees apart") {
  std::vector<double> probs(91, 0.0);
  probs[30] = 1.0;
  probs[31] = 0.99;
  probs[32] = 0.98;
  probs[45] = 0.2;
  const DoaPick p = PickTwoDoas(probs);
  CHECK_FALSE(p.fallback);
  CHECK(std::abs(p.theta_b - p.theta_a) >= 6);
}

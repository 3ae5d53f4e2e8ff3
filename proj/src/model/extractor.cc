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

#include "model/extractor.h"

#include <cmath>

namespace tsx {

namespace {

// Checkpoint/config compatibility ignores the init seed: weights come from
// the file, not the initializer.
nlohmann::json ConfigKey(const ModelConfig& cfg) {
  nlohmann::json j = cfg.ToJson();
  j.erase("init_seed");
  return j;
}

}  // namespace

ExtractorModel::ExtractorModel(const ModelConfig& cfg)
    : cfg_(cfg), engine_(cfg.stft) {
  cfg_.Validate();
  Rng rng(cfg_.init_seed);
  const auto& C = cfg_.encoder_channels;
  const int S = static_cast<int>(C.size());
  const std::vector<int> F = cfg_.FreqSizes();
  const int D = cfg_.bottleneck_dim;
  const int flat = C.back() * F.back();

  mix_enc_ = std::make_unique<ConvStack>(&ps_, "mix_enc", 2 * cfg_.mix_channels,
                                         C, /*kt=*/3, &rng);
  // Time kernel 1 keeps the enrollment frame-mean order-invariant.
  enr_enc_ = std::make_unique<ConvStack>(&ps_, "enr_enc", 2, C, /*kt=*/1, &rng);

  nn::InitKaimingUniform(ps_.Create("mix_proj.w", {flat, D}), flat, rng);
  ps_.Create("mix_proj.b", {D});
  nn::InitKaimingUniform(ps_.Create("enr_proj.w", {flat, D}), flat, rng);
  ps_.Create("enr_proj.b", {D});
  nn::InitNormal(ps_.Create("doa_table", {cfg_.doa_bins, D}), 0.1, rng);

  RegisterFilmNet("film1.gamma", 1.0, rng);
  RegisterFilmNet("film1.beta", 0.0, rng);
  RegisterFilmNet("film2.gamma", 1.0, rng);
  RegisterFilmNet("film2.beta", 0.0, rng);
  RegisterFilmNet("filmc.gamma", 1.0, rng);
  RegisterFilmNet("filmc.beta", 0.0, rng);

  for (const char* n : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"})
    nn::InitKaimingUniform(ps_.Create(n, {D, D}), D, rng);
  for (const char* n : {"attn.bq", "attn.bk", "attn.bv", "attn.bo"})
    ps_.Create(n, {D});
  nn::InitNormal(ps_.Create("attn.token1", {D}), 0.1, rng);
  nn::InitNormal(ps_.Create("attn.token2", {D}), 0.1, rng);

  nn::InitKaimingUniform(ps_.Create("cls.w1", {D, D}), D, rng);
  ps_.Create("cls.b1", {D});
  ps_.Create("cls.prelu1", {1}).data[0] = 0.25;
  nn::InitKaimingUniform(ps_.Create("cls.w2", {D, D}), D, rng);
  ps_.Create("cls.b2", {D});
  ps_.Create("cls.prelu2", {1}).data[0] = 0.25;
  nn::InitKaimingUniform(ps_.Create("cls.w3", {D, cfg_.class_count}), D, rng);
  ps_.Create("cls.b3", {cfg_.class_count});

  nn::InitKaimingUniform(ps_.Create("dec_proj.w", {D, flat}), D, rng);
  ps_.Create("dec_proj.b", {flat});
  for (int i = S - 1; i >= 0; --i) {
    const int cin = 2 * C[i];
    const int cout = i > 0 ? C[i - 1] : 2;
    const std::string sp = "dec.s" + std::to_string(i);
    nn::InitKaimingUniform(ps_.Create(sp + ".conv.w", {cin, cout, 3, 3}),
                           cin * 9, rng);
    ps_.Create(sp + ".conv.b", {cout});
    if (i > 0) {
      nn::Tensor& g = ps_.Create(sp + ".norm.gamma", {cout});
      std::fill(g.data.begin(), g.data.end(), 1.0);
      ps_.Create(sp + ".norm.beta", {cout});
      nn::Tensor& s = ps_.Create(sp + ".prelu", {cout});
      std::fill(s.data.begin(), s.data.end(), 0.25);
    }
  }
}

void ExtractorModel::RegisterFilmNet(const std::string& name, double bias_value,
                                     Rng& rng) {
  const int D = cfg_.bottleneck_dim;
  const int H = cfg_.film_hidden;
  // Zero final weights + constant bias give exact identity FiLM at init.
  if (H == 0) {
    ps_.Create(name + ".w", {D, D});
    nn::Tensor& b = ps_.Create(name + ".b", {D});
    std::fill(b.data.begin(), b.data.end(), bias_value);
    return;
  }
  nn::InitKaimingUniform(ps_.Create(name + ".w1", {D, H}), D, rng);
  ps_.Create(name + ".b1", {H});
  ps_.Create(name + ".prelu", {1}).data[0] = 0.25;
  ps_.Create(name + ".w2", {H, D});
  nn::Tensor& b2 = ps_.Create(name + ".b2", {D});
  std::fill(b2.data.begin(), b2.data.end(), bias_value);
}

nn::Var ExtractorModel::FilmNet(nn::Tape& t, const std::string& name,
                                nn::Var cond) {
  if (cfg_.film_hidden == 0)
    return nn::Linear(t, cond, ParamLeaf(t, ps_, name + ".w"),
                      ParamLeaf(t, ps_, name + ".b"));
  nn::Var h = nn::PRelu(
      t,
      nn::Linear(t, cond, ParamLeaf(t, ps_, name + ".w1"),
                 ParamLeaf(t, ps_, name + ".b1")),
      ParamLeaf(t, ps_, name + ".prelu"));
  return nn::Linear(t, h, ParamLeaf(t, ps_, name + ".w2"),
                    ParamLeaf(t, ps_, name + ".b2"));
}

const nn::Tensor& ExtractorModel::PositionalEncoding(int frames) {
  auto it = pe_cache_.find(frames);
  if (it != pe_cache_.end()) return it->second;
  const int D = cfg_.bottleneck_dim;
  nn::Tensor pe({frames, D});
  for (int tt = 0; tt < frames; ++tt)
    for (int d = 0; d < D; ++d) {
      const double rate = std::pow(10000.0, -static_cast<double>(d / 2 * 2) / D);
      pe.at(tt, d) = (d % 2 == 0) ? std::sin(tt * rate) : std::cos(tt * rate);
    }
  return pe_cache_.emplace(frames, std::move(pe)).first->second;
}

nn::Var ExtractorModel::Attend(nn::Tape& t, nn::Var frames, int pass) {
  TSX_CHECK(pass == 1 || pass == 2, "attend", "pass index must be 1 or 2");
  const int D = cfg_.bottleneck_dim;
  const int H = cfg_.attention_heads;
  const int dh = D / H;
  nn::Var tok =
      ParamLeaf(t, ps_, pass == 1 ? "attn.token1" : "attn.token2");
  nn::Var x = nn::PrependRow(t, frames, tok);
  nn::Var q = nn::Linear(t, x, ParamLeaf(t, ps_, "attn.wq"),
                         ParamLeaf(t, ps_, "attn.bq"));
  nn::Var k = nn::Linear(t, x, ParamLeaf(t, ps_, "attn.wk"),
                         ParamLeaf(t, ps_, "attn.bk"));
  nn::Var v = nn::Linear(t, x, ParamLeaf(t, ps_, "attn.wv"),
                         ParamLeaf(t, ps_, "attn.bv"));
  std::vector<nn::Var> heads;
  for (int h = 0; h < H; ++h) {
    nn::Var qh = nn::SliceCols(t, q, h * dh, (h + 1) * dh);
    nn::Var kh = nn::SliceCols(t, k, h * dh, (h + 1) * dh);
    nn::Var vh = nn::SliceCols(t, v, h * dh, (h + 1) * dh);
    nn::Var scores =
        nn::Scale(t, nn::MatMul(t, qh, nn::Transpose(t, kh)), 1.0 / std::sqrt(dh));
    heads.push_back(nn::MatMul(t, nn::SoftmaxRows(t, scores), vh));
  }
  nn::Var o = nn::Linear(t, nn::ConcatCols(t, heads),
                         ParamLeaf(t, ps_, "attn.wo"),
                         ParamLeaf(t, ps_, "attn.bo"));
  return nn::DropFirstRow(t, nn::Add(t, x, o));
}

ExtractorModel::Forward ExtractorModel::Run(nn::Tape& t,
                                            const nn::Tensor& mix_ri,
                                            const nn::Tensor& enroll_ri,
                                            int theta_deg) {
  const auto& C = cfg_.encoder_channels;
  const int S = static_cast<int>(C.size());
  const std::vector<int> F = cfg_.FreqSizes();
  const int K = cfg_.stft.bins_kept;
  const int D = cfg_.bottleneck_dim;
  TSX_CHECK(mix_ri.rank() == 3 && mix_ri.dim(0) == 2 * cfg_.mix_channels &&
                mix_ri.dim(1) == K,
            "extract", "mixture features must be (2J," << K << ",T), got "
                << mix_ri.ShapeStr());
  TSX_CHECK(enroll_ri.rank() == 3 && enroll_ri.dim(0) == 2 &&
                enroll_ri.dim(1) == K,
            "extract", "enrollment features must be (2," << K << ",T'), got "
                << enroll_ri.ShapeStr());
  TSX_CHECK(theta_deg >= 0 && theta_deg <= 180 && theta_deg % 2 == 0,
            "extract", "DOA " << theta_deg << " is off the 2-degree grid");
  const int T = mix_ri.dim(2);
  const int Tp = enroll_ri.dim(2);
  const int flat = C.back() * F.back();

  // Mixture encoder -> per-frame embeddings.
  std::vector<nn::Var> skips = mix_enc_->Forward(t, t.Leaf(mix_ri));
  nn::Var emb_x = nn::Linear(
      t, nn::Transpose(t, nn::Reshape(t, skips.back(), {flat, T})),
      ParamLeaf(t, ps_, "mix_proj.w"), ParamLeaf(t, ps_, "mix_proj.b"));

  // Enrollment encoder -> frame-mean spectral embedding.
  std::vector<nn::Var> eouts = enr_enc_->Forward(t, t.Leaf(enroll_ri));
  nn::Var spectral = nn::MeanRows(
      t, nn::Linear(t, nn::Transpose(t, nn::Reshape(t, eouts.back(), {flat, Tp})),
                    ParamLeaf(t, ps_, "enr_proj.w"),
                    ParamLeaf(t, ps_, "enr_proj.b")));
  nn::Var emb_r = nn::Add(
      t, spectral, nn::EmbeddingRow(t, ParamLeaf(t, ps_, "doa_table"), theta_deg / 2));

  // Pass 1: FiLM on the mixture embedding, then attention.
  nn::Var film1 = nn::RowBroadcastAdd(
      t, nn::RowBroadcastMul(t, emb_x, FilmNet(t, "film1.gamma", emb_r)),
      FilmNet(t, "film1.beta", emb_r));
  nn::Var p1 = Attend(t, nn::AddConst(t, film1, PositionalEncoding(T)), 1);

  // Scenario classifier on the pass-1 frame mean.
  nn::Var summary = nn::MeanRows(t, p1);
  if (cfg_.classifier_stop_gradient) summary = t.Leaf(t.val(summary));
  nn::Var h1 = nn::PRelu(
      t,
      nn::Linear(t, summary, ParamLeaf(t, ps_, "cls.w1"),
                 ParamLeaf(t, ps_, "cls.b1")),
      ParamLeaf(t, ps_, "cls.prelu1"));
  nn::Var emb_c = nn::PRelu(
      t,
      nn::Linear(t, h1, ParamLeaf(t, ps_, "cls.w2"),
                 ParamLeaf(t, ps_, "cls.b2")),
      ParamLeaf(t, ps_, "cls.prelu2"));
  nn::Var logits = nn::Linear(t, emb_c, ParamLeaf(t, ps_, "cls.w3"),
                              ParamLeaf(t, ps_, "cls.b3"));

  // Guidance = FiLM(r, c); pass 2 FiLMs the pre-pass-1 mixture embedding.
  nn::Var guidance =
      nn::Add(t, nn::Mul(t, emb_r, FilmNet(t, "filmc.gamma", emb_c)),
              FilmNet(t, "filmc.beta", emb_c));
  nn::Var film2 = nn::RowBroadcastAdd(
      t, nn::RowBroadcastMul(t, emb_x, FilmNet(t, "film2.gamma", guidance)),
      FilmNet(t, "film2.beta", guidance));
  nn::Var p2 = Attend(t, nn::AddConst(t, film2, PositionalEncoding(T)), 2);

  // Decoder with encoder skips; the last stage emits the RI estimate.
  nn::Var cur = nn::Reshape(
      t,
      nn::Transpose(t, nn::Linear(t, p2, ParamLeaf(t, ps_, "dec_proj.w"),
                                  ParamLeaf(t, ps_, "dec_proj.b"))),
      {C.back(), F.back(), T});
  for (int i = S - 1; i >= 0; --i) {
    const std::string sp = "dec.s" + std::to_string(i);
    cur = nn::ConcatChannels(t, cur, skips[i]);
    cur = nn::ConvTranspose2d(t, cur, ParamLeaf(t, ps_, sp + ".conv.w"),
                              ParamLeaf(t, ps_, sp + ".conv.b"), 2, 1);
    if (i > 0) {
      cur = nn::InstanceNorm(t, cur, ParamLeaf(t, ps_, sp + ".norm.gamma"),
                             ParamLeaf(t, ps_, sp + ".norm.beta"));
      cur = nn::PRelu(t, cur, ParamLeaf(t, ps_, sp + ".prelu"));
    }
  }

  Forward out;
  out.estimate = nn::Istft(t, cur, engine_);
  out.class_logits = logits;
  out.film1 = film1;
  out.emb_x = emb_x;
  return out;
}

Wave ExtractorModel::Extract(const MultiWave& mixture, const Wave& enrollment,
                             int theta_deg, std::vector<double>* class_probs) {
  RiSpectrogram mix_spec = engine_.Forward(mixture);
  RiSpectrogram enr_spec = engine_.Forward(enrollment);
  nn::Tape t;
  Forward f = Run(t, mix_spec.data, enr_spec.data, theta_deg);
  const nn::Tensor& est = t.val(f.estimate);
  Wave w(est.numel());
  for (int64_t i = 0; i < est.numel(); ++i) w[i] = est.data[i];
  if (class_probs) {
    const nn::Tensor& z = t.val(f.class_logits);
    double mx = z.data[0];
    for (double v : z.data) mx = std::max(mx, v);
    double se = 0;
    class_probs->resize(z.numel());
    for (int64_t i = 0; i < z.numel(); ++i)
      se += ((*class_probs)[i] = std::exp(z.data[i] - mx));
    for (double& p : *class_probs) p /= se;
  }
  return w;
}

void ExtractorModel::Save(const std::string& path, const nn::AdamW* opt,
                          nlohmann::json meta) {
  meta["schema"] = "tsx-extractor-v1";
  meta["model_config"] = cfg_.ToJson();
  meta["stft_config"] = StftConfigToJson(cfg_.stft);
  nn::SaveCheckpoint(path, ps_, opt, meta);
}

nlohmann::json ExtractorModel::Load(const std::string& path, nn::AdamW* opt) {
  nlohmann::json meta = nn::LoadCheckpoint(path, &ps_, opt);
  TSX_CHECK(meta.value("schema", "") == "tsx-extractor-v1", "checkpoint",
            path << " is not an extractor checkpoint");
  const ModelConfig file_cfg = ModelConfig::FromJson(meta.at("model_config"));
  TSX_CHECK(ConfigKey(file_cfg) == ConfigKey(cfg_), "checkpoint",
            "checkpoint " << path << " was trained with a different model config");
  return meta;
}

std::unique_ptr<ExtractorModel> ExtractorModel::FromCheckpoint(
    const std::string& path) {
  nlohmann::json meta = nn::ReadCheckpointMeta(path);
  TSX_CHECK(meta.contains("model_config"), "checkpoint",
            path << " has no model config header");
  auto model = std::make_unique<ExtractorModel>(
      ModelConfig::FromJson(meta.at("model_config")));
  model->Load(path);
  return model;
}

}  // namespace tsx

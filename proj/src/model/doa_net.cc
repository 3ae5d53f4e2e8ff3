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

#include "model/doa_net.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sim/geometry.h"

namespace tsx {

DoaNet::DoaNet(const DoaConfig& cfg) : cfg_(cfg), engine_(cfg.stft) {
  cfg_.Validate();
  Rng rng(cfg_.init_seed);
  const auto& C = cfg_.encoder_channels;
  std::vector<int> f{cfg_.stft.bins_kept};
  for (size_t s = 0; s < C.size(); ++s) f.push_back((f.back() - 1) / 2 + 1);
  const int flat = C.back() * f.back();
  enc_ = std::make_unique<ConvStack>(&ps_, "enc", 2 * cfg_.mix_channels, C,
                                     /*kt=*/3, &rng);
  nn::InitKaimingUniform(ps_.Create("proj.w", {flat, cfg_.embed_dim}), flat, rng);
  ps_.Create("proj.b", {cfg_.embed_dim});
  nn::InitKaimingUniform(ps_.Create("head.w", {cfg_.embed_dim, cfg_.doa_bins}),
                         cfg_.embed_dim, rng);
  ps_.Create("head.b", {cfg_.doa_bins});
}

nn::Var DoaNet::Run(nn::Tape& t, const nn::Tensor& mix_ri) {
  TSX_CHECK(mix_ri.rank() == 3 && mix_ri.dim(0) == 2 * cfg_.mix_channels &&
                mix_ri.dim(1) == cfg_.stft.bins_kept,
            "doa-net", "mixture features must be (2J," << cfg_.stft.bins_kept
                << ",T), got " << mix_ri.ShapeStr());
  const int T = mix_ri.dim(2);
  std::vector<nn::Var> outs = enc_->Forward(t, t.Leaf(mix_ri));
  const nn::Tensor& top = t.val(outs.back());
  const int flat = top.dim(0) * top.dim(1);
  nn::Var frames = nn::Linear(
      t, nn::Transpose(t, nn::Reshape(t, outs.back(), {flat, T})),
      ParamLeaf(t, ps_, "proj.w"), ParamLeaf(t, ps_, "proj.b"));
  return nn::Linear(t, nn::MeanRows(t, frames), ParamLeaf(t, ps_, "head.w"),
                    ParamLeaf(t, ps_, "head.b"));
}

std::vector<double> DoaNet::Probs(const MultiWave& mixture) {
  RiSpectrogram spec = engine_.Forward(mixture);
  nn::Tape t;
  nn::Var logits = Run(t, spec.data);
  const nn::Tensor& z = t.val(logits);
  std::vector<double> p(z.numel());
  for (int64_t i = 0; i < z.numel(); ++i)
    p[i] = 1.0 / (1.0 + std::exp(-z.data[i]));
  return p;
}

void DoaNet::Save(const std::string& path, const nn::AdamW* opt,
                  nlohmann::json meta) {
  meta["schema"] = "tsx-doa-v1";
  meta["model_config"] = cfg_.ToJson();
  nn::SaveCheckpoint(path, ps_, opt, meta);
}

nlohmann::json DoaNet::Load(const std::string& path, nn::AdamW* opt) {
  nlohmann::json meta = nn::LoadCheckpoint(path, &ps_, opt);
  TSX_CHECK(meta.value("schema", "") == "tsx-doa-v1", "checkpoint",
            path << " is not a DOA-estimator checkpoint");
  return meta;
}

std::unique_ptr<DoaNet> DoaNet::FromCheckpoint(const std::string& path) {
  nlohmann::json meta = nn::ReadCheckpointMeta(path);
  TSX_CHECK(meta.contains("model_config"), "checkpoint",
            path << " has no model config header");
  auto model =
      std::make_unique<DoaNet>(DoaConfig::FromJson(meta.at("model_config")));
  model->Load(path);
  return model;
}

DoaPick PickTwoDoas(const std::vector<double>& probs) {
  TSX_CHECK(probs.size() == static_cast<size_t>(kDoaGridBins), "pick-doa",
            "expected " << kDoaGridBins << " probabilities, got " << probs.size());
  constexpr double kFloor = 1e-6;
  const int n = static_cast<int>(probs.size());

  // Peaks: strictly above at least one neighbor, not below any.
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    bool ge = true, gt = false;
    if (i > 0) {
      ge = ge && probs[i] >= probs[i - 1];
      gt = gt || probs[i] > probs[i - 1];
    }
    if (i < n - 1) {
      ge = ge && probs[i] >= probs[i + 1];
      gt = gt || probs[i] > probs[i + 1];
    }
    if (ge && gt && probs[i] > kFloor) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](int a, int b) { return probs[a] > probs[b]; });

  std::vector<int> picked;
  for (int p : peaks) {
    bool suppressed = false;
    for (int q : picked) suppressed = suppressed || std::abs(p - q) <= 2;
    if (!suppressed) picked.push_back(p);
    if (picked.size() == 2) break;
  }

  DoaPick out;
  if (picked.size() < 2) {
    // Degenerate distribution: fall back to the two largest raw bins.
    out.fallback = true;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    picked = {idx[0], idx[1]};
  }
  const int a = std::min(picked[0], picked[1]);
  const int b = std::max(picked[0], picked[1]);
  out.theta_a = BinToDoa(a);
  out.theta_b = BinToDoa(b);
  return out;
}

}  // namespace tsx

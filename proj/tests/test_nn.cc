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
#include <fstream>
#include <functional>
#include <vector>

#include "doctest.h"

#include "nn/checkpoint.h"
#include "nn/ops.h"
#include "nn/optim.h"
#include "test_util.h"

using namespace tsx;
using namespace tsx::nn;
using testutil::TempDir;

namespace {

Tensor RandomTensor(std::vector<int> shape, uint64_t seed, double scale = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (double& v : t.data) v = scale * rng.Normal();
  return t;
}

// Central-difference gradient check of a scalar-valued graph against
// reverse-mode autodiff, over every element of every input.
using GraphFn = std::function<Var(Tape&, const std::vector<Var>&)>;

void GradCheck(std::vector<Tensor> inputs, const GraphFn& fn,
               double tol = 1e-6, double h = 1e-5) {
  std::vector<Tensor> grads;
  for (const Tensor& in : inputs) grads.push_back(Tensor::Zeros(in.shape));
  {
    Tape t;
    std::vector<Var> vars;
    for (size_t i = 0; i < inputs.size(); ++i)
      vars.push_back(t.Leaf(inputs[i], &grads[i]));
    const Var loss = fn(t, vars);
    REQUIRE(t.val(loss).numel() == 1);
    t.Backward(loss);
  }
  auto eval = [&]() {
    Tape t;
    std::vector<Var> vars;
    for (const Tensor& in : inputs) vars.push_back(t.Leaf(in));
    return t.val(fn(t, vars)).data[0];
  };
  for (size_t i = 0; i < inputs.size(); ++i)
    for (int64_t j = 0; j < inputs[i].numel(); ++j) {
      const double keep = inputs[i].data[j];
      inputs[i].data[j] = keep + h;
      const double up = eval();
      inputs[i].data[j] = keep - h;
      const double dn = eval();
      inputs[i].data[j] = keep;
      const double fd = (up - dn) / (2 * h);
      const double ad = grads[i].data[j];
      const double denom = std::max({1.0, std::abs(fd), std::abs(ad)});
      CHECK(std::abs(fd - ad) / denom < tol);
    }
}

// Projects any output to a scalar with a fixed random tensor so every output
// element participates in the loss.
Var ToScalar(Tape& t, Var v, uint64_t seed) {
  return DotConst(t, v, RandomTensor(t.val(v).shape, seed));
}

}  // namespace

TEST_CASE("gradcheck: elementwise and shape ops") {
  GradCheck({RandomTensor({3, 4}, 1), RandomTensor({3, 4}, 2)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Add(t, v[0], v[1]), 900);
            });
  GradCheck({RandomTensor({3, 4}, 3), RandomTensor({3, 4}, 4)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Sub(t, v[0], v[1]), 901);
            });
  GradCheck({RandomTensor({3, 4}, 5), RandomTensor({3, 4}, 6)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Mul(t, v[0], v[1]), 902);
            });
  GradCheck({RandomTensor({5}, 7)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, Scale(t, v[0], -2.5), 903);
  });
  GradCheck({RandomTensor({5}, 8)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, AddScalarConst(t, v[0], 0.7), 904);
  });
  GradCheck({RandomTensor({2, 6}, 9)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, AddConst(t, v[0], RandomTensor({2, 6}, 99)), 905);
  });
  GradCheck({RandomTensor({2, 6}, 10)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, Reshape(t, v[0], {3, 4}), 906);
  });
  GradCheck({RandomTensor({3, 3}, 11)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, Sigmoid(t, v[0]), 907);
  });
}

TEST_CASE("gradcheck: matrix ops") {
  GradCheck({RandomTensor({3, 4}, 20), RandomTensor({4, 2}, 21)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, MatMul(t, v[0], v[1]), 910);
            });
  GradCheck({RandomTensor({3, 5}, 22)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, Transpose(t, v[0]), 911);
  });
  GradCheck({RandomTensor({4, 6}, 23)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, SliceCols(t, v[0], 1, 4), 912);
  });
  GradCheck({RandomTensor({3, 2}, 24), RandomTensor({3, 3}, 25)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, ConcatCols(t, {v[0], v[1]}), 913);
            });
  GradCheck({RandomTensor({4, 3}, 26), RandomTensor({3}, 27)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, PrependRow(t, v[0], v[1]), 914);
            });
  GradCheck({RandomTensor({4, 3}, 28)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, DropFirstRow(t, v[0]), 915);
  });
  GradCheck({RandomTensor({3, 5}, 29)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, SoftmaxRows(t, v[0]), 916);
  });
  GradCheck({RandomTensor({6, 4}, 30)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, MeanRows(t, v[0]), 917);
  });
  GradCheck({RandomTensor({4, 3}, 31), RandomTensor({3}, 32)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, RowBroadcastMul(t, v[0], v[1]), 918);
            });
  GradCheck({RandomTensor({4, 3}, 33), RandomTensor({3}, 34)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, RowBroadcastAdd(t, v[0], v[1]), 919);
            });
  GradCheck({RandomTensor({4, 3}, 35), RandomTensor({3, 5}, 36),
             RandomTensor({5}, 37)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Linear(t, v[0], v[1], v[2]), 920);
            });
  GradCheck({RandomTensor({3}, 38), RandomTensor({3, 5}, 39),
             RandomTensor({5}, 40)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Linear(t, v[0], v[1], v[2]), 921);
            });
}

TEST_CASE("gradcheck: convolutions") {
  // Odd frequency size with stride 2 / pad 1 (the encoder plan).
  GradCheck({RandomTensor({2, 9, 5}, 50), RandomTensor({3, 2, 3, 3}, 51),
             RandomTensor({3}, 52)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Conv2d(t, v[0], v[1], v[2], 2, 1), 930);
            },
            1e-5);
  GradCheck({RandomTensor({3, 5, 4}, 53), RandomTensor({3, 2, 3, 3}, 54),
             RandomTensor({2}, 55)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, ConvTranspose2d(t, v[0], v[1], v[2], 2, 1), 931);
            },
            1e-5);
}

TEST_CASE("conv transpose inverts the conv frequency chain") {
  // f -> (f-1)/2+1 under conv(k=3,s=2,p=1); the transpose maps back exactly.
  for (int f : {129, 65, 33, 17, 9, 5}) {
    const int down = (f - 1) / 2 + 1;
    const int up = (down - 1) * 2 - 2 + 3;
    CHECK(up == f);
  }
}

TEST_CASE("gradcheck: instance norm, prelu, concat, embedding") {
  GradCheck({RandomTensor({2, 4, 3}, 60), RandomTensor({2}, 61),
             RandomTensor({2}, 62)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, InstanceNorm(t, v[0], v[1], v[2]), 940);
            },
            1e-5);
  // Inputs bounded away from the PReLU kink.
  Tensor px = RandomTensor({2, 3, 4}, 67);
  for (double& v : px.data)
    if (std::abs(v) < 0.1) v = v < 0 ? -0.1 : 0.1;
  GradCheck({px, RandomTensor({2}, 68)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, PRelu(t, v[0], v[1]), 942);
            });
  GradCheck({px, RandomTensor({1}, 69)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, PRelu(t, v[0], v[1]), 943);
            });
  GradCheck({RandomTensor({2, 3, 4}, 70), RandomTensor({3, 3, 4}, 71)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, ConcatChannels(t, v[0], v[1]), 944);
            });
  GradCheck({RandomTensor({5, 4}, 72)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, EmbeddingRow(t, v[0], 2), 945);
  });
}

TEST_CASE("gradcheck: scalar ops and losses") {
  GradCheck({RandomTensor({6}, 80), RandomTensor({6}, 81)},
            [](Tape& t, const std::vector<Var>& v) {
              return Dot(t, v[0], v[1]);
            });
  GradCheck({RandomTensor({6}, 82)}, [](Tape& t, const std::vector<Var>& v) {
    return DotConst(t, v[0], RandomTensor({6}, 83));
  });
  GradCheck({RandomTensor({1}, 84), RandomTensor({1}, 85)},
            [](Tape& t, const std::vector<Var>& v) {
              return MulScalars(t, v[0], v[1]);
            });
  GradCheck({Tensor::Full({1}, 2.3)}, [](Tape& t, const std::vector<Var>& v) {
    return LogScalar(t, v[0]);
  });
  GradCheck({RandomTensor({4}, 86), RandomTensor({4}, 87),
             RandomTensor({4}, 88)},
            [](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, AddN(t, {v[0], v[1], v[2]}), 950);
            });
  GradCheck({RandomTensor({1}, 89)}, [](Tape& t, const std::vector<Var>& v) {
    return ToScalar(t, ScaleConstTensor(t, RandomTensor({5}, 90), v[0]), 951);
  });
  GradCheck({RandomTensor({3}, 91)}, [](Tape& t, const std::vector<Var>& v) {
    return CrossEntropyLogits(t, v[0], 1);
  });
  Tensor targets({7});
  targets.data = {0, 1, 0, 0.5, 1, 0, 0.25};
  GradCheck({RandomTensor({7}, 92)},
            [&](Tape& t, const std::vector<Var>& v) {
              return BceWithLogits(t, v[0], targets);
            });
  Tensor ref = RandomTensor({64}, 93);
  Tensor est = ref;
  for (int64_t i = 0; i < est.numel(); ++i) est.data[i] += 0.3 * (i % 5 - 2);
  GradCheck({est}, [&](Tape& t, const std::vector<Var>& v) {
    return NegSiSdrLoss(t, v[0], ref);
  }, 1e-5);
}

TEST_CASE("gradcheck: synthesis op") {
  StftConfig cfg;
  const StftEngine engine(cfg);
  GradCheck({RandomTensor({2, 129, 3}, 95)},
            [&](Tape& t, const std::vector<Var>& v) {
              return ToScalar(t, Istft(t, v[0], engine), 960);
            },
            1e-5);
}

TEST_CASE("cross-entropy forward matches a direct softmax computation") {
  Tape t;
  Tensor z({3});
  z.data = {0.2, -1.4, 2.0};
  const Var loss = CrossEntropyLogits(t, t.Leaf(z), 2);
  double se = 0;
  for (double v : z.data) se += std::exp(v);
  CHECK(t.val(loss).data[0] ==
        doctest::Approx(-std::log(std::exp(2.0) / se)).epsilon(1e-12));
}

TEST_CASE("adamw: decoupled decay shrinks parameters with zero gradient") {
  ParamStore ps;
  Tensor& w = ps.Create("w", {3});
  w.data = {1.0, -2.0, 4.0};
  AdamWConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.5;
  AdamW opt(&ps, cfg);
  opt.Step();
  CHECK(opt.step_count() == 1);
  CHECK(ps.Value("w").data[0] == doctest::Approx(1.0 * (1 - 0.05)));
  CHECK(ps.Value("w").data[1] == doctest::Approx(-2.0 * (1 - 0.05)));
}

TEST_CASE("adamw: first step moves by ~lr in the gradient direction") {
  ParamStore ps;
  Tensor& w = ps.Create("w", {2});
  w.data = {0.0, 0.0};
  ps.Grad("w").data = {1.0, -3.0};
  AdamWConfig cfg;
  cfg.lr = 0.01;
  cfg.weight_decay = 0.0;
  AdamW opt(&ps, cfg);
  opt.Step();
  // After bias correction the first update is -lr * g / (|g| + eps).
  CHECK(ps.Value("w").data[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(ps.Value("w").data[1] == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("param store: gradient clipping preserves direction") {
  ParamStore ps;
  ps.Create("a", {2});
  ps.Grad("a").data = {3.0, 4.0};  // norm 5
  ps.ClipGradNorm(1.0);
  CHECK(std::sqrt(ps.GradNormSq()) == doctest::Approx(1.0));
  CHECK(ps.Grad("a").data[0] / ps.Grad("a").data[1] == doctest::Approx(0.75));
  ps.ClipGradNorm(10.0);  // already below the limit: untouched
  CHECK(std::sqrt(ps.GradNormSq()) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint: exact round trip of params, buffers, optimizer") {
  TempDir tmp("ckpt");
  ParamStore ps;
  ps.Create("b.w", {2, 3});
  ps.Create("a.w", {4});
  Rng rng(5);
  for (auto& [name, e] : ps.params())
    for (double& v : e.value.data) v = rng.Normal();
  ps.Buffer("a.running", {4}).data = {1, 2, 3, 4};
  AdamW opt(&ps, AdamWConfig{});
  for (auto& [name, e] : ps.params())
    for (double& v : e.grad.data) v = rng.Normal();
  opt.Step();

  nlohmann::json meta;
  meta["note"] = "round-trip";
  SaveCheckpoint(tmp.file("m.ckpt"), ps, &opt, meta);

  ParamStore ps2;
  AdamW opt2(&ps2, AdamWConfig{});
  const nlohmann::json meta2 = LoadCheckpoint(tmp.file("m.ckpt"), &ps2, &opt2);
  CHECK(meta2.at("note") == "round-trip");
  CHECK(opt2.step_count() == 1);
  for (const auto& [name, e] : ps.params()) {
    REQUIRE(ps2.Has(name));
    const Tensor& v2 = ps2.Value(name);
    REQUIRE(v2.shape == e.value.shape);
    for (int64_t i = 0; i < v2.numel(); ++i) CHECK(v2.data[i] == e.value.data[i]);
  }
  const Tensor& buf = ps2.Buffer("a.running", {4});
  for (int i = 0; i < 4; ++i) CHECK(buf.data[i] == double(i + 1));
  for (auto& [name, m] : opt.m_state())
    for (int64_t i = 0; i < m.numel(); ++i)
      CHECK(opt2.m_state().at(name).data[i] == m.data[i]);

  CHECK(ReadCheckpointMeta(tmp.file("m.ckpt")).at("note") == "round-trip");
}

TEST_CASE("file fingerprint is content-sensitive") {
  TempDir tmp("fp");
  {
    std::ofstream(tmp.file("a")) << "hello";
    std::ofstream(tmp.file("b")) << "hellp";
  }
  CHECK(FileFingerprint(tmp.file("a")) != FileFingerprint(tmp.file("b")));
  CHECK(FileFingerprint(tmp.file("a")).size() == 16);
}

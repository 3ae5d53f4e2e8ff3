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

#ifndef TSX_NN_PARAMS_H_
#define TSX_NN_PARAMS_H_

#include <map>
#include <string>
#include <vector>

#include "nn/tensor.h"
#include "util/rng.h"

namespace tsx {
namespace nn {

// Named parameters (trainable, with paired gradient buffers) and buffers
// (non-trainable state such as batch-norm running statistics). Names are kept
// in a sorted map so serialization order is deterministic.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
  };

  Tensor& Create(const std::string& name, std::vector<int> shape) {
    TSX_CHECK(!params_.count(name), "params", "duplicate parameter " << name);
    Entry e;
    e.value = Tensor::Zeros(shape);
    e.grad = Tensor::Zeros(shape);
    return params_.emplace(name, std::move(e)).first->second.value;
  }

  bool Has(const std::string& name) const { return params_.count(name) > 0; }

  Tensor& Value(const std::string& name) { return Find(name).value; }
  Tensor& Grad(const std::string& name) { return Find(name).grad; }

  Tensor& Buffer(const std::string& name, std::vector<int> shape) {
    auto it = buffers_.find(name);
    if (it == buffers_.end())
      it = buffers_.emplace(name, Tensor::Zeros(shape)).first;
    return it->second;
  }

  void ZeroGrads() {
    for (auto& [name, e] : params_)
      std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
  }

  int64_t NumTrainable() const {
    int64_t n = 0;
    for (const auto& [name, e] : params_) n += e.value.numel();
    return n;
  }

  double GradNormSq() const {
    double s = 0;
    for (const auto& [name, e] : params_)
      for (double g : e.grad.data) s += g * g;
    return s;
  }

  // Scales all gradients so their global L2 norm is at most max_norm.
  void ClipGradNorm(double max_norm) {
    const double norm = std::sqrt(GradNormSq());
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto& [name, e] : params_)
      for (double& g : e.grad.data) g *= scale;
  }

  bool GradsFinite() const {
    for (const auto& [name, e] : params_)
      if (!e.grad.AllFinite()) return false;
    return true;
  }

  std::map<std::string, Entry>& params() { return params_; }
  const std::map<std::string, Entry>& params() const { return params_; }
  std::map<std::string, Tensor>& buffers() { return buffers_; }
  const std::map<std::string, Tensor>& buffers() const { return buffers_; }

 private:
  Entry& Find(const std::string& name) {
    auto it = params_.find(name);
    TSX_CHECK(it != params_.end(), "params", "unknown parameter " << name);
    return it->second;
  }

  std::map<std::string, Entry> params_;
  std::map<std::string, Tensor> buffers_;
};

// fan_in-scaled uniform init (Kaiming, gain for leaky units).
inline void InitKaimingUniform(Tensor& w, int fan_in, Rng& rng) {
  TSX_CHECK(fan_in > 0, "init", "non-positive fan-in");
  const double bound = std::sqrt(6.0 / fan_in);
  for (double& v : w.data) v = rng.Uniform(-bound, bound);
}

inline void InitNormal(Tensor& w, double stddev, Rng& rng) {
  for (double& v : w.data) v = stddev * rng.Normal();
}

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_PARAMS_H_

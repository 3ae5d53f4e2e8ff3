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

#ifndef TSX_NN_OPTIM_H_
#define TSX_NN_OPTIM_H_

#include <cmath>
#include <map>
#include <string>

#include "nn/params.h"

namespace tsx {
namespace nn {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

// Decoupled weight decay: the decay term multiplies the parameter directly
// rather than entering the moment estimates.
class AdamW {
 public:
  AdamW(ParamStore* store, AdamWConfig cfg) : store_(store), cfg_(cfg) {}

  void Step() {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, step_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, step_);
    for (auto& [name, e] : store_->params()) {
      Tensor& m = Moment(m_, name, e.value.shape);
      Tensor& v = Moment(v_, name, e.value.shape);
      for (int64_t i = 0; i < e.value.numel(); ++i) {
        const double g = e.grad.data[i];
        m.data[i] = cfg_.beta1 * m.data[i] + (1 - cfg_.beta1) * g;
        v.data[i] = cfg_.beta2 * v.data[i] + (1 - cfg_.beta2) * g * g;
        const double mhat = m.data[i] / bc1;
        const double vhat = v.data[i] / bc2;
        e.value.data[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                                      cfg_.weight_decay * e.value.data[i]);
      }
    }
  }

  int64_t step_count() const { return step_; }
  void set_step_count(int64_t s) { step_ = s; }
  AdamWConfig& config() { return cfg_; }
  const AdamWConfig& config() const { return cfg_; }
  std::map<std::string, Tensor>& m_state() { return m_; }
  std::map<std::string, Tensor>& v_state() { return v_; }

 private:
  Tensor& Moment(std::map<std::string, Tensor>& s, const std::string& name,
                 const std::vector<int>& shape) {
    auto it = s.find(name);
    if (it == s.end()) it = s.emplace(name, Tensor::Zeros(shape)).first;
    TSX_CHECK(it->second.shape == shape, "adamw",
              "stale optimizer state for " << name);
    return it->second;
  }

  ParamStore* store_;
  AdamWConfig cfg_;
  int64_t step_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_OPTIM_H_

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

#include "model/conv_stack.h"

namespace tsx {

nn::Var ParamLeaf(nn::Tape& t, nn::ParamStore& ps, const std::string& name) {
  return t.Leaf(ps.Value(name), &ps.Grad(name));
}

ConvStack::ConvStack(nn::ParamStore* ps, std::string prefix, int in_channels,
                     std::vector<int> channels, int kt, Rng* rng)
    : ps_(ps), prefix_(std::move(prefix)), channels_(std::move(channels)), kt_(kt) {
  constexpr int kKf = 3;
  int cin = in_channels;
  for (size_t s = 0; s < channels_.size(); ++s) {
    const int cout = channels_[s];
    const std::string sp = prefix_ + ".s" + std::to_string(s);
    nn::Tensor& w = ps_->Create(sp + ".conv.w", {cout, cin, kKf, kt_});
    nn::InitKaimingUniform(w, cin * kKf * kt_, *rng);
    ps_->Create(sp + ".conv.b", {cout});
    nn::Tensor& gamma = ps_->Create(sp + ".norm.gamma", {cout});
    std::fill(gamma.data.begin(), gamma.data.end(), 1.0);
    ps_->Create(sp + ".norm.beta", {cout});
    nn::Tensor& slope = ps_->Create(sp + ".prelu", {cout});
    std::fill(slope.data.begin(), slope.data.end(), 0.25);
    cin = cout;
  }
}

std::vector<nn::Var> ConvStack::Forward(nn::Tape& t, nn::Var x) {
  std::vector<nn::Var> outs;
  nn::Var cur = x;
  for (size_t s = 0; s < channels_.size(); ++s) {
    const std::string sp = prefix_ + ".s" + std::to_string(s);
    cur = nn::Conv2d(t, cur, ParamLeaf(t, *ps_, sp + ".conv.w"),
                     ParamLeaf(t, *ps_, sp + ".conv.b"), /*stride_f=*/2,
                     /*pad_f=*/1);
    cur = nn::InstanceNorm(t, cur, ParamLeaf(t, *ps_, sp + ".norm.gamma"),
                           ParamLeaf(t, *ps_, sp + ".norm.beta"));
    cur = nn::PRelu(t, cur, ParamLeaf(t, *ps_, sp + ".prelu"));
    outs.push_back(cur);
  }
  return outs;
}

}  // namespace tsx

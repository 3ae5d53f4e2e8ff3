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

#ifndef TSX_MODEL_CONV_STACK_H_
#define TSX_MODEL_CONV_STACK_H_

#include <string>
#include <vector>

#include "nn/ops.h"
#include "nn/params.h"

namespace tsx {

// Registers a parameter leaf on the tape bound to its external grad buffer.
nn::Var ParamLeaf(nn::Tape& t, nn::ParamStore& ps, const std::string& name);

// Strided conv encoder: per stage conv(kernel kf x kt, stride 2 along
// frequency, pad 1) + instance norm + per-channel PReLU. Stateless across
// forwards — normalization statistics come from each input itself.
class ConvStack {
 public:
  ConvStack(nn::ParamStore* ps, std::string prefix, int in_channels,
            std::vector<int> channels, int kt, Rng* rng);

  // Returns every stage's post-activation output; back() is the stack output.
  std::vector<nn::Var> Forward(nn::Tape& t, nn::Var x);

  int out_channels() const { return channels_.back(); }

 private:
  nn::ParamStore* ps_;
  std::string prefix_;
  std::vector<int> channels_;
  int kt_;
};

}  // namespace tsx

#endif  // TSX_MODEL_CONV_STACK_H_

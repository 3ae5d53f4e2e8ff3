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

#ifndef TSX_NN_TAPE_H_
#define TSX_NN_TAPE_H_

#include <functional>
#include <utility>
#include <vector>

#include "nn/tensor.h"

namespace tsx {
namespace nn {

// Index of a node on the tape.
using Var = int;

// Reverse-mode autodiff over a linear tape. Each op appends one node whose
// backward closure scatters the node's gradient into its parents' gradients.
class Tape {
 public:
  Var Leaf(Tensor value, Tensor* grad_sink = nullptr) {
    nodes_.push_back(Node{std::move(value), Tensor{}, nullptr, grad_sink});
    return static_cast<Var>(nodes_.size()) - 1;
  }

  Var Emplace(Tensor value, std::function<void(Tape&, Var)> backward) {
    nodes_.push_back(Node{std::move(value), Tensor{}, std::move(backward), nullptr});
    return static_cast<Var>(nodes_.size()) - 1;
  }

  const Tensor& val(Var v) const { return nodes_[v].value; }

  Tensor& grad(Var v) {
    Node& n = nodes_[v];
    if (n.grad.shape.empty() && !n.value.shape.empty())
      n.grad = Tensor::Zeros(n.value.shape);
    return n.grad;
  }

  // Seeds d(loss)/d(loss) = 1 and runs the tape in reverse. Parameter leaves
  // accumulate into their external grad sinks.
  void Backward(Var loss) {
    TSX_CHECK(nodes_[loss].value.numel() == 1, "tape",
              "backward target must be a scalar");
    grad(loss).data[0] = 1.0;
    for (Var v = loss; v >= 0; --v) {
      Node& n = nodes_[v];
      if (n.grad.shape.empty()) continue;  // not reached by any gradient
      if (n.backward) n.backward(*this, v);
      if (n.grad_sink) {
        TSX_CHECK(n.grad_sink->SameShape(n.grad), "tape",
                  "grad sink shape mismatch");
        for (int64_t i = 0; i < n.grad.numel(); ++i)
          n.grad_sink->data[i] += n.grad.data[i];
      }
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, Var)> backward;
    Tensor* grad_sink = nullptr;
  };
  std::vector<Node> nodes_;
};

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_TAPE_H_

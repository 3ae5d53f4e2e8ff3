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

#ifndef TSX_NN_TENSOR_H_
#define TSX_NN_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "util/error.h"

namespace tsx {
namespace nn {

// Dense row-major tensor of doubles. Rank 1..3 is what the model uses.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(NumelOf(shape), 0.0);
  }

  static int64_t NumelOf(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  static Tensor Zeros(std::vector<int> s) { return Tensor(std::move(s)); }

  static Tensor Full(std::vector<int> s, double v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  static Tensor FromVector(const std::vector<double>& v) {
    Tensor t({static_cast<int>(v.size())});
    t.data = v;
    return t;
  }

  static Tensor Scalar(double v) {
    Tensor t({1});
    t.data[0] = v;
    return t;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[i]; }

  double& at(int i) { return data[i]; }
  double at(int i) const { return data[i]; }
  double& at(int i, int j) { return data[static_cast<int64_t>(i) * shape[1] + j]; }
  double at(int i, int j) const { return data[static_cast<int64_t>(i) * shape[1] + j]; }
  double& at(int i, int j, int k) {
    return data[(static_cast<int64_t>(i) * shape[1] + j) * shape[2] + k];
  }
  double at(int i, int j, int k) const {
    return data[(static_cast<int64_t>(i) * shape[1] + j) * shape[2] + k];
  }

  bool SameShape(const Tensor& o) const { return shape == o.shape; }

  std::string ShapeStr() const {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + ")";
  }

  bool AllFinite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_TENSOR_H_

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

#include "nn/ops.h"

#include <cmath>

#include <Eigen/Dense>

namespace tsx {
namespace nn {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<MatRM> MapMat(Tensor& t, int64_t rows, int64_t cols) {
  return Eigen::Map<MatRM>(t.data.data(), rows, cols);
}

Eigen::Map<const MatRM> MapMat(const Tensor& t, int64_t rows, int64_t cols) {
  return Eigen::Map<const MatRM>(t.data.data(), rows, cols);
}

void CheckRank2(const Tensor& t, const char* op) {
  TSX_CHECK(t.rank() == 2, op, "expected rank-2 tensor, got " << t.ShapeStr());
}

// Gathers conv patches: rows indexed by (f_out * T + t), cols by
// (c_in * kf * kt + i * kt + j).
MatRM Im2Col(const Tensor& x, int kf, int kt, int stride_f, int pad_f,
             int pad_t, int f_out) {
  const int c_in = x.dim(0), f_in = x.dim(1), frames = x.dim(2);
  MatRM p(static_cast<int64_t>(f_out) * frames, c_in * kf * kt);
  p.setZero();
  for (int fo = 0; fo < f_out; ++fo)
    for (int tt = 0; tt < frames; ++tt) {
      const int64_t row = static_cast<int64_t>(fo) * frames + tt;
      for (int c = 0; c < c_in; ++c)
        for (int i = 0; i < kf; ++i) {
          const int f = fo * stride_f - pad_f + i;
          if (f < 0 || f >= f_in) continue;
          for (int j = 0; j < kt; ++j) {
            const int tj = tt - pad_t + j;
            if (tj < 0 || tj >= frames) continue;
            p(row, (c * kf + i) * kt + j) = x.at(c, f, tj);
          }
        }
    }
  return p;
}

// Adjoint of Im2Col: scatters patch-gradients back onto the input gradient.
void Col2ImAdd(const MatRM& gp, Tensor& gx, int kf, int kt, int stride_f,
               int pad_f, int pad_t, int f_out) {
  const int c_in = gx.dim(0), f_in = gx.dim(1), frames = gx.dim(2);
  for (int fo = 0; fo < f_out; ++fo)
    for (int tt = 0; tt < frames; ++tt) {
      const int64_t row = static_cast<int64_t>(fo) * frames + tt;
      for (int c = 0; c < c_in; ++c)
        for (int i = 0; i < kf; ++i) {
          const int f = fo * stride_f - pad_f + i;
          if (f < 0 || f >= f_in) continue;
          for (int j = 0; j < kt; ++j) {
            const int tj = tt - pad_t + j;
            if (tj < 0 || tj >= frames) continue;
            gx.at(c, f, tj) += gp(row, (c * kf + i) * kt + j);
          }
        }
    }
}

}  // namespace

Var Add(Tape& t, Var a, Var b) {
  TSX_CHECK(t.val(a).SameShape(t.val(b)), "add", "shape mismatch "
                << t.val(a).ShapeStr() << " vs " << t.val(b).ShapeStr());
  Tensor out = t.val(a);
  for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += t.val(b).data[i];
  return t.Emplace(std::move(out), [a, b](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (int64_t i = 0; i < g.numel(); ++i) {
      ga.data[i] += g.data[i];
      gb.data[i] += g.data[i];
    }
  });
}

Var Sub(Tape& t, Var a, Var b) {
  TSX_CHECK(t.val(a).SameShape(t.val(b)), "sub", "shape mismatch");
  Tensor out = t.val(a);
  for (int64_t i = 0; i < out.numel(); ++i) out.data[i] -= t.val(b).data[i];
  return t.Emplace(std::move(out), [a, b](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (int64_t i = 0; i < g.numel(); ++i) {
      ga.data[i] += g.data[i];
      gb.data[i] -= g.data[i];
    }
  });
}

Var Mul(Tape& t, Var a, Var b) {
  TSX_CHECK(t.val(a).SameShape(t.val(b)), "mul", "shape mismatch");
  Tensor out = t.val(a);
  for (int64_t i = 0; i < out.numel(); ++i) out.data[i] *= t.val(b).data[i];
  return t.Emplace(std::move(out), [a, b](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    const Tensor& va = t.val(a);
    const Tensor& vb = t.val(b);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (int64_t i = 0; i < g.numel(); ++i) {
      ga.data[i] += g.data[i] * vb.data[i];
      gb.data[i] += g.data[i] * va.data[i];
    }
  });
}

Var Scale(Tape& t, Var a, double c) {
  Tensor out = t.val(a);
  for (double& v : out.data) v *= c;
  return t.Emplace(std::move(out), [a, c](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += c * g.data[i];
  });
}

Var AddScalarConst(Tape& t, Var a, double c) {
  Tensor out = t.val(a);
  for (double& v : out.data) v += c;
  return t.Emplace(std::move(out), [a](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
  });
}

Var AddConst(Tape& t, Var a, const Tensor& c) {
  TSX_CHECK(t.val(a).SameShape(c), "add-const", "shape mismatch");
  Tensor out = t.val(a);
  for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += c.data[i];
  return t.Emplace(std::move(out), [a](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
  });
}

Var Reshape(Tape& t, Var a, std::vector<int> shape) {
  TSX_CHECK(Tensor::NumelOf(shape) == t.val(a).numel(), "reshape",
            "element count mismatch");
  Tensor out = t.val(a);
  out.shape = std::move(shape);
  return t.Emplace(std::move(out), [a](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
  });
}

Var Sigmoid(Tape& t, Var a) {
  Tensor out = t.val(a);
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return t.Emplace(std::move(out), [a](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.val(self);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < g.numel(); ++i)
      ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
  });
}

Var MatMul(Tape& t, Var a, Var b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  CheckRank2(va, "matmul");
  CheckRank2(vb, "matmul");
  TSX_CHECK(va.dim(1) == vb.dim(0), "matmul", "inner dim mismatch "
                << va.ShapeStr() << " x " << vb.ShapeStr());
  const int m = va.dim(0), k = va.dim(1), n = vb.dim(1);
  Tensor out({m, n});
  MapMat(out, m, n) = MapMat(va, m, k) * MapMat(vb, k, n);
  return t.Emplace(std::move(out), [a, b, m, k, n](Tape& t, Var self) {
    auto g = MapMat(t.grad(self), m, n);
    auto va = MapMat(t.val(a), m, k);
    auto vb = MapMat(t.val(b), k, n);
    MapMat(t.grad(a), m, k) += g * vb.transpose();
    MapMat(t.grad(b), k, n) += va.transpose() * g;
  });
}

Var Transpose(Tape& t, Var a) {
  const Tensor& va = t.val(a);
  CheckRank2(va, "transpose");
  const int m = va.dim(0), n = va.dim(1);
  Tensor out({n, m});
  MapMat(out, n, m) = MapMat(va, m, n).transpose();
  return t.Emplace(std::move(out), [a, m, n](Tape& t, Var self) {
    MapMat(t.grad(a), m, n) += MapMat(t.grad(self), n, m).transpose();
  });
}

Var SliceCols(Tape& t, Var a, int c0, int c1) {
  const Tensor& va = t.val(a);
  CheckRank2(va, "slice-cols");
  const int m = va.dim(0), n = va.dim(1);
  TSX_CHECK(0 <= c0 && c0 < c1 && c1 <= n, "slice-cols", "bad column range");
  Tensor out({m, c1 - c0});
  MapMat(out, m, c1 - c0) = MapMat(va, m, n).middleCols(c0, c1 - c0);
  return t.Emplace(std::move(out), [a, m, n, c0, c1](Tape& t, Var self) {
    MapMat(t.grad(a), m, n).middleCols(c0, c1 - c0) +=
        MapMat(t.grad(self), m, c1 - c0);
  });
}

Var ConcatCols(Tape& t, const std::vector<Var>& parts) {
  TSX_CHECK(!parts.empty(), "concat-cols", "no inputs");
  const int m = t.val(parts[0]).dim(0);
  int n = 0;
  for (Var p : parts) {
    CheckRank2(t.val(p), "concat-cols");
    TSX_CHECK(t.val(p).dim(0) == m, "concat-cols", "row mismatch");
    n += t.val(p).dim(1);
  }
  Tensor out({m, n});
  int off = 0;
  for (Var p : parts) {
    const int w = t.val(p).dim(1);
    MapMat(out, m, n).middleCols(off, w) = MapMat(t.val(p), m, w);
    off += w;
  }
  auto parts_copy = parts;
  return t.Emplace(std::move(out), [parts_copy, m, n](Tape& t, Var self) {
    auto g = MapMat(t.grad(self), m, n);
    int off = 0;
    for (Var p : parts_copy) {
      const int w = t.val(p).dim(1);
      MapMat(t.grad(p), m, w) += g.middleCols(off, w);
      off += w;
    }
  });
}

Var PrependRow(Tape& t, Var x, Var row) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "prepend-row");
  const int m = vx.dim(0), d = vx.dim(1);
  TSX_CHECK(t.val(row).numel() == d, "prepend-row", "row width mismatch");
  Tensor out({m + 1, d});
  std::copy(t.val(row).data.begin(), t.val(row).data.end(), out.data.begin());
  std::copy(vx.data.begin(), vx.data.end(), out.data.begin() + d);
  return t.Emplace(std::move(out), [x, row, m, d](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& gr = t.grad(row);
    Tensor& gx = t.grad(x);
    for (int j = 0; j < d; ++j) gr.data[j] += g.data[j];
    for (int64_t i = 0; i < static_cast<int64_t>(m) * d; ++i)
      gx.data[i] += g.data[d + i];
  });
}

Var DropFirstRow(Tape& t, Var x) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "drop-first-row");
  const int m = vx.dim(0), d = vx.dim(1);
  TSX_CHECK(m >= 2, "drop-first-row", "needs at least two rows");
  Tensor out({m - 1, d});
  std::copy(vx.data.begin() + d, vx.data.end(), out.data.begin());
  return t.Emplace(std::move(out), [x, m, d](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(x);
    for (int64_t i = 0; i < static_cast<int64_t>(m - 1) * d; ++i)
      gx.data[d + i] += g.data[i];
  });
}

Var SoftmaxRows(Tape& t, Var x) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "softmax");
  const int m = vx.dim(0), n = vx.dim(1);
  Tensor out = vx;
  auto o = MapMat(out, m, n);
  for (int i = 0; i < m; ++i) {
    const double mx = o.row(i).maxCoeff();
    o.row(i) = (o.row(i).array() - mx).exp();
    o.row(i) /= o.row(i).sum();
  }
  return t.Emplace(std::move(out), [x, m, n](Tape& t, Var self) {
    auto g = MapMat(t.grad(self), m, n);
    auto y = MapMat(t.val(self), m, n);
    auto gx = MapMat(t.grad(x), m, n);
    for (int i = 0; i < m; ++i) {
      const double dot = g.row(i).dot(y.row(i));
      gx.row(i) += (g.row(i).array() - dot).matrix().cwiseProduct(y.row(i));
    }
  });
}

Var MeanRows(Tape& t, Var x) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "mean-rows");
  const int m = vx.dim(0), d = vx.dim(1);
  TSX_CHECK(m >= 1, "mean-rows", "empty input");
  Tensor out({d});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) out.data[j] += vx.at(i, j);
  for (double& v : out.data) v /= m;
  return t.Emplace(std::move(out), [x, m, d](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) gx.at(i, j) += g.data[j] / m;
  });
}

Var RowBroadcastMul(Tape& t, Var x, Var g) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "row-mul");
  const int m = vx.dim(0), d = vx.dim(1);
  TSX_CHECK(t.val(g).numel() == d, "row-mul", "vector width mismatch");
  Tensor out = vx;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) *= t.val(g).data[j];
  return t.Emplace(std::move(out), [x, g, m, d](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    const Tensor& vx = t.val(x);
    const Tensor& vg = t.val(g);
    Tensor& gx = t.grad(x);
    Tensor& gg = t.grad(g);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) {
        gx.at(i, j) += go.at(i, j) * vg.data[j];
        gg.data[j] += go.at(i, j) * vx.at(i, j);
      }
  });
}

Var RowBroadcastAdd(Tape& t, Var x, Var b) {
  const Tensor& vx = t.val(x);
  CheckRank2(vx, "row-add");
  const int m = vx.dim(0), d = vx.dim(1);
  TSX_CHECK(t.val(b).numel() == d, "row-add", "vector width mismatch");
  Tensor out = vx;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) += t.val(b).data[j];
  return t.Emplace(std::move(out), [x, b, m, d](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    Tensor& gx = t.grad(x);
    Tensor& gb = t.grad(b);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) {
        gx.at(i, j) += go.at(i, j);
        gb.data[j] += go.at(i, j);
      }
  });
}

Var Linear(Tape& t, Var x, Var w, Var b) {
  const Tensor& vx = t.val(x);
  const Tensor& vw = t.val(w);
  CheckRank2(vw, "linear");
  const bool vec_in = vx.rank() == 1;
  const int rows = vec_in ? 1 : vx.dim(0);
  const int din = vec_in ? vx.dim(0) : vx.dim(1);
  const int dout = vw.dim(1);
  TSX_CHECK(vw.dim(0) == din, "linear", "weight shape " << vw.ShapeStr()
                << " does not accept input " << vx.ShapeStr());
  TSX_CHECK(t.val(b).numel() == dout, "linear", "bias width mismatch");
  Tensor out(vec_in ? std::vector<int>{dout} : std::vector<int>{rows, dout});
  MapMat(out, rows, dout) = MapMat(vx, rows, din) * MapMat(vw, din, dout);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dout; ++j) out.data[static_cast<int64_t>(i) * dout + j] += t.val(b).data[j];
  return t.Emplace(std::move(out), [x, w, b, rows, din, dout](Tape& t, Var self) {
    auto g = MapMat(t.grad(self), rows, dout);
    auto vx = MapMat(t.val(x), rows, din);
    auto vw = MapMat(t.val(w), din, dout);
    MapMat(t.grad(x), rows, din) += g * vw.transpose();
    MapMat(t.grad(w), din, dout) += vx.transpose() * g;
    Tensor& gb = t.grad(b);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < dout; ++j) gb.data[j] += g(i, j);
  });
}

Var Conv2d(Tape& t, Var x, Var w, Var b, int stride_f, int pad_f) {
  const Tensor& vx = t.val(x);
  const Tensor& vw = t.val(w);
  TSX_CHECK(vx.rank() == 3, "conv2d", "input must be (C,F,T)");
  TSX_CHECK(vw.rank() == 4, "conv2d", "weight must be (Cout,Cin,kf,kt)");
  const int c_in = vx.dim(0), f_in = vx.dim(1), frames = vx.dim(2);
  const int c_out = vw.dim(0), kf = vw.dim(2), kt = vw.dim(3);
  TSX_CHECK(vw.dim(1) == c_in, "conv2d", "channel mismatch: input has "
                << c_in << ", weight expects " << vw.dim(1));
  const int pad_t = kt / 2;
  const int f_out = (f_in + 2 * pad_f - kf) / stride_f + 1;
  TSX_CHECK(f_out >= 1, "conv2d", "kernel larger than padded input");

  MatRM patches = Im2Col(vx, kf, kt, stride_f, pad_f, pad_t, f_out);
  auto wm = MapMat(vw, c_out, c_in * kf * kt);
  MatRM m = patches * wm.transpose();  // (f_out*T, c_out)

  Tensor out({c_out, f_out, frames});
  for (int c = 0; c < c_out; ++c) {
    const double bias = t.val(b).data[c];
    for (int fo = 0; fo < f_out; ++fo)
      for (int tt = 0; tt < frames; ++tt)
        out.at(c, fo, tt) = m(static_cast<int64_t>(fo) * frames + tt, c) + bias;
  }
  return t.Emplace(std::move(out), [x, w, b, c_in, f_in, frames, c_out, kf, kt,
                                    stride_f, pad_f, pad_t, f_out](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    MatRM gm(static_cast<int64_t>(f_out) * frames, c_out);
    Tensor& gb = t.grad(b);
    for (int c = 0; c < c_out; ++c) {
      double acc = 0.0;
      for (int fo = 0; fo < f_out; ++fo)
        for (int tt = 0; tt < frames; ++tt) {
          const double v = go.at(c, fo, tt);
          gm(static_cast<int64_t>(fo) * frames + tt, c) = v;
          acc += v;
        }
      gb.data[c] += acc;
    }
    MatRM patches = Im2Col(t.val(x), kf, kt, stride_f, pad_f, pad_t, f_out);
    auto wm = MapMat(t.val(w), c_out, c_in * kf * kt);
    MapMat(t.grad(w), c_out, c_in * kf * kt) += gm.transpose() * patches;
    MatRM gp = gm * wm;  // (f_out*T, c_in*kf*kt)
    Col2ImAdd(gp, t.grad(x), kf, kt, stride_f, pad_f, pad_t, f_out);
  });
}

Var ConvTranspose2d(Tape& t, Var x, Var w, Var b, int stride_f, int pad_f) {
  const Tensor& vx = t.val(x);
  const Tensor& vw = t.val(w);
  TSX_CHECK(vx.rank() == 3, "conv2d-t", "input must be (C,F,T)");
  TSX_CHECK(vw.rank() == 4, "conv2d-t", "weight must be (Cin,Cout,kf,kt)");
  const int c_in = vx.dim(0), f_in = vx.dim(1), frames = vx.dim(2);
  const int c_out = vw.dim(1), kf = vw.dim(2), kt = vw.dim(3);
  TSX_CHECK(vw.dim(0) == c_in, "conv2d-t", "channel mismatch");
  const int pad_t = kt / 2;
  const int f_out = (f_in - 1) * stride_f - 2 * pad_f + kf;
  TSX_CHECK(f_out >= 1, "conv2d-t", "degenerate output height");

  // Rows indexed by (f_in * T + t), columns by input channel.
  MatRM xm(static_cast<int64_t>(f_in) * frames, c_in);
  for (int c = 0; c < c_in; ++c)
    for (int f = 0; f < f_in; ++f)
      for (int tt = 0; tt < frames; ++tt)
        xm(static_cast<int64_t>(f) * frames + tt, c) = vx.at(c, f, tt);
  auto wm = MapMat(vw, c_in, c_out * kf * kt);
  MatRM cols = xm * wm;  // (f_in*T, c_out*kf*kt)

  Tensor out({c_out, f_out, frames});
  for (int c = 0; c < c_out; ++c) {
    const double bias = t.val(b).data[c];
    for (int fo = 0; fo < f_out; ++fo)
      for (int tt = 0; tt < frames; ++tt) out.at(c, fo, tt) = bias;
  }
  for (int f = 0; f < f_in; ++f)
    for (int tt = 0; tt < frames; ++tt) {
      const int64_t row = static_cast<int64_t>(f) * frames + tt;
      for (int c = 0; c < c_out; ++c)
        for (int i = 0; i < kf; ++i) {
          const int fo = f * stride_f - pad_f + i;
          if (fo < 0 || fo >= f_out) continue;
          for (int j = 0; j < kt; ++j) {
            const int to = tt - pad_t + j;
            if (to < 0 || to >= frames) continue;
            out.at(c, fo, to) += cols(row, (c * kf + i) * kt + j);
          }
        }
    }
  return t.Emplace(std::move(out), [x, w, b, c_in, f_in, frames, c_out, kf, kt,
                                    stride_f, pad_f, pad_t, f_out](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    Tensor& gb = t.grad(b);
    for (int c = 0; c < c_out; ++c) {
      double acc = 0.0;
      for (int fo = 0; fo < f_out; ++fo)
        for (int tt = 0; tt < frames; ++tt) acc += go.at(c, fo, tt);
      gb.data[c] += acc;
    }
    // Gather the scattered output gradient back into column layout.
    MatRM gcols(static_cast<int64_t>(f_in) * frames, c_out * kf * kt);
    gcols.setZero();
    for (int f = 0; f < f_in; ++f)
      for (int tt = 0; tt < frames; ++tt) {
        const int64_t row = static_cast<int64_t>(f) * frames + tt;
        for (int c = 0; c < c_out; ++c)
          for (int i = 0; i < kf; ++i) {
            const int fo = f * stride_f - pad_f + i;
            if (fo < 0 || fo >= f_out) continue;
            for (int j = 0; j < kt; ++j) {
              const int to = tt - pad_t + j;
              if (to < 0 || to >= frames) continue;
              gcols(row, (c * kf + i) * kt + j) = go.at(c, fo, to);
            }
          }
      }
    MatRM xm(static_cast<int64_t>(f_in) * frames, c_in);
    const Tensor& vx = t.val(x);
    for (int c = 0; c < c_in; ++c)
      for (int f = 0; f < f_in; ++f)
        for (int tt = 0; tt < frames; ++tt)
          xm(static_cast<int64_t>(f) * frames + tt, c) = vx.at(c, f, tt);
    auto wm = MapMat(t.val(w), c_in, c_out * kf * kt);
    MapMat(t.grad(w), c_in, c_out * kf * kt) += xm.transpose() * gcols;
    MatRM gxm = gcols * wm.transpose();  // (f_in*T, c_in)
    Tensor& gx = t.grad(x);
    for (int c = 0; c < c_in; ++c)
      for (int f = 0; f < f_in; ++f)
        for (int tt = 0; tt < frames; ++tt)
          gx.at(c, f, tt) += gxm(static_cast<int64_t>(f) * frames + tt, c);
  });
}

Var InstanceNorm(Tape& t, Var x, Var gamma, Var beta, double eps) {
  const Tensor& vx = t.val(x);
  TSX_CHECK(vx.rank() == 3, "instancenorm", "input must be (C,F,T)");
  const int c = vx.dim(0);
  const int64_t m = static_cast<int64_t>(vx.dim(1)) * vx.dim(2);
  TSX_CHECK(t.val(gamma).numel() == c && t.val(beta).numel() == c,
            "instancenorm", "scale/shift width mismatch");

  std::vector<double> mu(c), var(c);
  for (int ch = 0; ch < c; ++ch) {
    double s = 0, s2 = 0;
    const double* p = vx.data.data() + static_cast<int64_t>(ch) * m;
    for (int64_t i = 0; i < m; ++i) {
      s += p[i];
      s2 += p[i] * p[i];
    }
    mu[ch] = s / m;
    var[ch] = std::max(0.0, s2 / m - mu[ch] * mu[ch]);
  }

  Tensor out = vx;
  for (int ch = 0; ch < c; ++ch) {
    const double inv = 1.0 / std::sqrt(var[ch] + eps);
    const double g = t.val(gamma).data[ch], bb = t.val(beta).data[ch];
    double* p = out.data.data() + static_cast<int64_t>(ch) * m;
    for (int64_t i = 0; i < m; ++i) p[i] = (p[i] - mu[ch]) * inv * g + bb;
  }
  return t.Emplace(std::move(out), [x, gamma, beta, c, m, mu, var,
                                    eps](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    const Tensor& vx = t.val(x);
    Tensor& gx = t.grad(x);
    Tensor& gg = t.grad(gamma);
    Tensor& gb = t.grad(beta);
    for (int ch = 0; ch < c; ++ch) {
      const double inv = 1.0 / std::sqrt(var[ch] + eps);
      const double gam = t.val(gamma).data[ch];
      const double* xp = vx.data.data() + static_cast<int64_t>(ch) * m;
      const double* gp = go.data.data() + static_cast<int64_t>(ch) * m;
      double* gxp = gx.data.data() + static_cast<int64_t>(ch) * m;
      double sum_g = 0, sum_gxhat = 0;
      for (int64_t i = 0; i < m; ++i) {
        const double xhat = (xp[i] - mu[ch]) * inv;
        sum_g += gp[i];
        sum_gxhat += gp[i] * xhat;
      }
      gb.data[ch] += sum_g;
      gg.data[ch] += sum_gxhat;
      const double mg = sum_g / m, mgx = sum_gxhat / m;
      for (int64_t i = 0; i < m; ++i) {
        const double xhat = (xp[i] - mu[ch]) * inv;
        gxp[i] += gam * inv * (gp[i] - mg - xhat * mgx);
      }
    }
  });
}

Var PRelu(Tape& t, Var x, Var slope) {
  const Tensor& vx = t.val(x);
  const Tensor& vs = t.val(slope);
  const bool per_channel = vs.numel() > 1;
  int64_t per = 0;
  if (per_channel) {
    TSX_CHECK(vx.rank() == 3 && vx.dim(0) == vs.numel(), "prelu",
              "per-channel slope requires matching (C,F,T) input");
    per = static_cast<int64_t>(vx.dim(1)) * vx.dim(2);
  }
  Tensor out = vx;
  for (int64_t i = 0; i < out.numel(); ++i) {
    const double a = per_channel ? vs.data[i / per] : vs.data[0];
    if (out.data[i] < 0) out.data[i] *= a;
  }
  return t.Emplace(std::move(out), [x, slope, per_channel, per](Tape& t, Var self) {
    const Tensor& go = t.grad(self);
    const Tensor& vx = t.val(x);
    const Tensor& vs = t.val(slope);
    Tensor& gx = t.grad(x);
    Tensor& gs = t.grad(slope);
    for (int64_t i = 0; i < go.numel(); ++i) {
      const int64_t si = per_channel ? i / per : 0;
      if (vx.data[i] >= 0) {
        gx.data[i] += go.data[i];
      } else {
        gx.data[i] += go.data[i] * vs.data[si];
        gs.data[si] += go.data[i] * vx.data[i];
      }
    }
  });
}

Var ConcatChannels(Tape& t, Var a, Var b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  TSX_CHECK(va.rank() == 3 && vb.rank() == 3 && va.dim(1) == vb.dim(1) &&
                va.dim(2) == vb.dim(2),
            "concat-ch", "shape mismatch " << va.ShapeStr() << " vs " << vb.ShapeStr());
  Tensor out({va.dim(0) + vb.dim(0), va.dim(1), va.dim(2)});
  std::copy(va.data.begin(), va.data.end(), out.data.begin());
  std::copy(vb.data.begin(), vb.data.end(), out.data.begin() + va.numel());
  return t.Emplace(std::move(out), [a, b](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    const int64_t na = ga.numel();
    for (int64_t i = 0; i < na; ++i) ga.data[i] += g.data[i];
    for (int64_t i = 0; i < gb.numel(); ++i) gb.data[i] += g.data[na + i];
  });
}

Var EmbeddingRow(Tape& t, Var table, int row) {
  const Tensor& vt = t.val(table);
  CheckRank2(vt, "embedding");
  TSX_CHECK(row >= 0 && row < vt.dim(0), "embedding", "row " << row << " out of range");
  const int d = vt.dim(1);
  Tensor out({d});
  for (int j = 0; j < d; ++j) out.data[j] = vt.at(row, j);
  return t.Emplace(std::move(out), [table, row, d](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Tensor& gt = t.grad(table);
    for (int j = 0; j < d; ++j) gt.at(row, j) += g.data[j];
  });
}

Var Dot(Tape& t, Var a, Var b) {
  TSX_CHECK(t.val(a).numel() == t.val(b).numel(), "dot", "length mismatch");
  double acc = 0;
  for (int64_t i = 0; i < t.val(a).numel(); ++i)
    acc += t.val(a).data[i] * t.val(b).data[i];
  return t.Emplace(Tensor::Scalar(acc), [a, b](Tape& t, Var self) {
    const double g = t.grad(self).data[0];
    const Tensor& va = t.val(a);
    const Tensor& vb = t.val(b);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (int64_t i = 0; i < va.numel(); ++i) {
      ga.data[i] += g * vb.data[i];
      gb.data[i] += g * va.data[i];
    }
  });
}

Var DotConst(Tape& t, Var a, const Tensor& c) {
  TSX_CHECK(t.val(a).numel() == c.numel(), "dot-const", "length mismatch");
  double acc = 0;
  for (int64_t i = 0; i < c.numel(); ++i) acc += t.val(a).data[i] * c.data[i];
  Tensor cc = c;
  return t.Emplace(Tensor::Scalar(acc), [a, cc](Tape& t, Var self) {
    const double g = t.grad(self).data[0];
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < cc.numel(); ++i) ga.data[i] += g * cc.data[i];
  });
}

Var MulScalars(Tape& t, Var a, Var b) {
  TSX_CHECK(t.val(a).numel() == 1 && t.val(b).numel() == 1, "mul-scalars",
            "inputs must be scalars");
  return t.Emplace(Tensor::Scalar(t.val(a).data[0] * t.val(b).data[0]),
                   [a, b](Tape& t, Var self) {
                     const double g = t.grad(self).data[0];
                     t.grad(a).data[0] += g * t.val(b).data[0];
                     t.grad(b).data[0] += g * t.val(a).data[0];
                   });
}

Var LogScalar(Tape& t, Var a) {
  TSX_CHECK(t.val(a).numel() == 1, "log", "input must be scalar");
  const double v = t.val(a).data[0];
  TSX_CHECK(v > 0, "log", "non-positive argument " << v);
  return t.Emplace(Tensor::Scalar(std::log(v)), [a](Tape& t, Var self) {
    t.grad(a).data[0] += t.grad(self).data[0] / t.val(a).data[0];
  });
}

Var AddN(Tape& t, const std::vector<Var>& xs) {
  TSX_CHECK(!xs.empty(), "add-n", "no inputs");
  Tensor out = t.val(xs[0]);
  for (size_t k = 1; k < xs.size(); ++k) {
    TSX_CHECK(t.val(xs[k]).SameShape(out), "add-n", "shape mismatch");
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += t.val(xs[k]).data[i];
  }
  auto xs_copy = xs;
  return t.Emplace(std::move(out), [xs_copy](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    for (Var x : xs_copy) {
      Tensor& gx = t.grad(x);
      for (int64_t i = 0; i < g.numel(); ++i) gx.data[i] += g.data[i];
    }
  });
}

Var ScaleConstTensor(Tape& t, const Tensor& c, Var s) {
  TSX_CHECK(t.val(s).numel() == 1, "scale-const", "scale must be scalar");
  Tensor out = c;
  const double sv = t.val(s).data[0];
  for (double& v : out.data) v *= sv;
  Tensor cc = c;
  return t.Emplace(std::move(out), [s, cc](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    double acc = 0;
    for (int64_t i = 0; i < g.numel(); ++i) acc += g.data[i] * cc.data[i];
    t.grad(s).data[0] += acc;
  });
}

Var CrossEntropyLogits(Tape& t, Var logits, int label) {
  const Tensor& z = t.val(logits);
  TSX_CHECK(z.rank() == 1, "ce", "logits must be a vector");
  TSX_CHECK(label >= 0 && label < z.dim(0), "ce", "label out of range");
  double mx = z.data[0];
  for (double v : z.data) mx = std::max(mx, v);
  double se = 0;
  for (double v : z.data) se += std::exp(v - mx);
  const double lse = mx + std::log(se);
  return t.Emplace(Tensor::Scalar(lse - z.data[label]),
                   [logits, label, lse](Tape& t, Var self) {
                     const double g = t.grad(self).data[0];
                     const Tensor& z = t.val(logits);
                     Tensor& gz = t.grad(logits);
                     for (int64_t i = 0; i < z.numel(); ++i) {
                       const double p = std::exp(z.data[i] - lse);
                       gz.data[i] += g * (p - (i == label ? 1.0 : 0.0));
                     }
                   });
}

Var BceWithLogits(Tape& t, Var logits, const Tensor& targets) {
  const Tensor& z = t.val(logits);
  TSX_CHECK(z.numel() == targets.numel(), "bce", "target length mismatch");
  double loss = 0;
  for (int64_t i = 0; i < z.numel(); ++i) {
    const double zi = z.data[i], yi = targets.data[i];
    loss += std::max(zi, 0.0) - zi * yi + std::log1p(std::exp(-std::abs(zi)));
  }
  Tensor y = targets;
  return t.Emplace(Tensor::Scalar(loss), [logits, y](Tape& t, Var self) {
    const double g = t.grad(self).data[0];
    const Tensor& z = t.val(logits);
    Tensor& gz = t.grad(logits);
    for (int64_t i = 0; i < z.numel(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-z.data[i]));
      gz.data[i] += g * (s - y.data[i]);
    }
  });
}

Var NegSiSdrLoss(Tape& t, Var est, const Tensor& ref, double eps) {
  TSX_CHECK(t.val(est).numel() == ref.numel(), "si-sdr-loss", "length mismatch");
  double ssq = 0;
  for (double v : ref.data) ssq += v * v;
  TSX_CHECK(ssq > 0, "si-sdr-loss", "zero reference");
  Var ip = DotConst(t, est, ref);
  Var alpha = Scale(t, ip, 1.0 / (ssq + eps));
  Var target = ScaleConstTensor(t, ref, alpha);
  Var err = Sub(t, est, target);
  Var den = AddScalarConst(t, Dot(t, err, err), eps);
  Var num = AddScalarConst(t, Scale(t, MulScalars(t, alpha, alpha), ssq), eps);
  Var diff = Sub(t, LogScalar(t, den), LogScalar(t, num));
  return Scale(t, diff, 10.0 / std::log(10.0));
}

Var Istft(Tape& t, Var ri, const StftEngine& engine) {
  const Tensor& v = t.val(ri);
  const int frames = v.dim(2);
  Wave wave = engine.Synthesize(v);
  Tensor out({static_cast<int>(wave.size())});
  for (int64_t i = 0; i < wave.size(); ++i) out.data[i] = wave[i];
  return t.Emplace(std::move(out), [ri, frames, &engine](Tape& t, Var self) {
    const Tensor& g = t.grad(self);
    Wave gw(g.numel());
    for (int64_t i = 0; i < g.numel(); ++i) gw[i] = g.data[i];
    Tensor adj = engine.SynthesizeAdjoint(gw, frames);
    Tensor& gr = t.grad(ri);
    for (int64_t i = 0; i < adj.numel(); ++i) gr.data[i] += adj.data[i];
  });
}

}  // namespace nn
}  // namespace tsx

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

#ifndef TSX_NN_OPS_H_
#define TSX_NN_OPS_H_

#include <vector>

#include "dsp/stft.h"
#include "nn/tape.h"

namespace tsx {
namespace nn {

// ---- elementwise / shape ----
Var Add(Tape& t, Var a, Var b);
Var Sub(Tape& t, Var a, Var b);
Var Mul(Tape& t, Var a, Var b);
Var Scale(Tape& t, Var a, double c);
Var AddScalarConst(Tape& t, Var a, double c);
Var AddConst(Tape& t, Var a, const Tensor& c);
Var Reshape(Tape& t, Var a, std::vector<int> shape);
Var Sigmoid(Tape& t, Var a);

// ---- matrix ops on [rows, cols] ----
Var MatMul(Tape& t, Var a, Var b);
Var Transpose(Tape& t, Var a);
Var SliceCols(Tape& t, Var a, int c0, int c1);
Var ConcatCols(Tape& t, const std::vector<Var>& parts);
Var PrependRow(Tape& t, Var x, Var row);  // row: [d]
Var DropFirstRow(Tape& t, Var x);
Var SoftmaxRows(Tape& t, Var x);
Var MeanRows(Tape& t, Var x);                  // [t,d] -> [d]
Var RowBroadcastMul(Tape& t, Var x, Var g);    // [t,d] * [d]
Var RowBroadcastAdd(Tape& t, Var x, Var b);    // [t,d] + [d]
// x: [rows, din] or [din]; w: [din, dout]; b: [dout]
Var Linear(Tape& t, Var x, Var w, Var b);

// ---- conv stack on [C, F, T] ----
// w: [Cout, Cin, kf, kt]; stride along frequency only; time uses "same"
// padding (kt / 2).
Var Conv2d(Tape& t, Var x, Var w, Var b, int stride_f, int pad_f);
// w: [Cin, Cout, kf, kt]; frequency upsampling by stride_f.
Var ConvTranspose2d(Tape& t, Var x, Var w, Var b, int stride_f, int pad_f);

// Per-channel normalization with statistics over (F,T) of the current
// forward (instance normalization). Inference therefore sees exactly the
// normalization the network was trained with — there is no train/eval
// statistics gap and no running state.
Var InstanceNorm(Tape& t, Var x, Var gamma, Var beta, double eps = 1e-5);
// slope: [C] (per channel of a rank-3 input) or [1] (shared).
Var PRelu(Tape& t, Var x, Var slope);
Var ConcatChannels(Tape& t, Var a, Var b);
Var EmbeddingRow(Tape& t, Var table, int row);

// ---- scalars (shape [1]) ----
Var Dot(Tape& t, Var a, Var b);
Var DotConst(Tape& t, Var a, const Tensor& c);
Var MulScalars(Tape& t, Var a, Var b);
Var LogScalar(Tape& t, Var a);  // requires positive input
Var AddN(Tape& t, const std::vector<Var>& xs);  // same-shape sum
// c * s for a constant tensor c and scalar var s.
Var ScaleConstTensor(Tape& t, const Tensor& c, Var s);

// ---- losses ----
Var CrossEntropyLogits(Tape& t, Var logits, int label);
// Sum over entries of BCE between sigmoid(logits) and targets in [0,1].
Var BceWithLogits(Tape& t, Var logits, const Tensor& targets);
// -SI-SDR(ref, est) in dB, eps-stabilized and unclamped (loss form).
Var NegSiSdrLoss(Tape& t, Var est, const Tensor& ref, double eps = 1e-8);

// ---- synthesis ----
// ri: [2, bins, frames] -> waveform [n]; exact adjoint in backward.
Var Istft(Tape& t, Var ri, const StftEngine& engine);

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_OPS_H_

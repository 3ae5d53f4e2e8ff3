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

#ifndef TSX_DSP_STFT_H_
#define TSX_DSP_STFT_H_

#include <string>

#include <Eigen/Dense>

#include "dsp/audio.h"
#include "nn/tensor.h"

namespace tsx {

struct StftConfig {
  int frame_size = 256;
  int hop = 128;          // 50% overlap
  int bins_kept = 129;    // frame_size / 2 + 1
  int sample_rate = 8000;

  void Validate() const;
  // Frames produced for a signal of n samples (no centering/padding).
  int NumFrames(int64_t n) const {
    return 1 + static_cast<int>((n - frame_size) / hop);
  }
  int64_t NumSamples(int frames) const {
    return static_cast<int64_t>(frames - 1) * hop + frame_size;
  }
};

// Real/imaginary STFT stack: shape (2 * channels, bins, frames) with all
// real-part channels first, then all imaginary-part channels.
struct RiSpectrogram {
  nn::Tensor data;
  StftConfig config;

  int ri_channels() const { return data.dim(0); }
  int channels() const { return data.dim(0) / 2; }
  int bins() const { return data.dim(1); }
  int frames() const { return data.dim(2); }
};

// Analysis/synthesis with a periodic Hamming window and least-squares
// overlap-add normalization. The transform matrices are materialized once so
// the synthesis adjoint used by training is exactly the matrix transpose.
class StftEngine {
 public:
  explicit StftEngine(const StftConfig& cfg = StftConfig());

  const StftConfig& config() const { return cfg_; }

  RiSpectrogram Forward(const Wave& signal) const;
  RiSpectrogram Forward(const MultiWave& signal) const;

  // Least-squares synthesis. For spectra produced by Forward this is an exact
  // round trip (up to floating-point error). Single-channel spectra only.
  Wave Inverse(const RiSpectrogram& spec) const;

  // Raw linear pieces, exposed for the differentiable synthesis op.
  // Synthesizes a (2, bins, frames) RI tensor to a waveform.
  Wave Synthesize(const nn::Tensor& ri) const;
  // Adjoint of Synthesize: maps a waveform-shaped gradient back to RI shape.
  nn::Tensor SynthesizeAdjoint(const Wave& grad, int frames) const;

  const Eigen::VectorXd& window() const { return window_; }

 private:
  Eigen::MatrixXd FrameSignal(const Wave& signal) const;

  StftConfig cfg_;
  Eigen::VectorXd window_;
  Eigen::MatrixXd dft_re_, dft_im_;    // (bins, frame_size), window folded in
  Eigen::MatrixXd syn_re_, syn_im_;    // (frame_size, bins)
};

// Debug container for spectrogram tensors (and any dense tensor):
// magic "TSXTEN1\n", int32 rank, int32 dims..., float64 data, little-endian.
void SaveTensor(const std::string& path, const nn::Tensor& t);
nn::Tensor LoadTensor(const std::string& path);

}  // namespace tsx

#endif  // TSX_DSP_STFT_H_

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

#include "dsp/stft.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "util/error.h"

namespace tsx {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void StftConfig::Validate() const {
  TSX_CHECK(hop == frame_size / 2, "stft", "hop must be frame_size/2");
  TSX_CHECK(bins_kept == frame_size / 2 + 1, "stft",
            "bins_kept must be frame_size/2+1");
}

StftEngine::StftEngine(const StftConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  const int n = cfg_.frame_size;
  const int k = cfg_.bins_kept;

  window_.resize(n);
  for (int i = 0; i < n; ++i)
    window_[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / n);  // periodic Hamming

  dft_re_.resize(k, n);
  dft_im_.resize(k, n);
  syn_re_.resize(n, k);
  syn_im_.resize(n, k);
  for (int b = 0; b < k; ++b) {
    const double ck = (b == 0 || b == k - 1) ? 1.0 : 2.0;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * kPi * b * i / n;
      dft_re_(b, i) = window_[i] * std::cos(a);
      dft_im_(b, i) = -window_[i] * std::sin(a);
      syn_re_(i, b) = ck * std::cos(a) / n;
      syn_im_(i, b) = -ck * std::sin(a) / n;
    }
  }
}

Eigen::MatrixXd StftEngine::FrameSignal(const Wave& signal) const {
  TSX_CHECK(signal.size() >= cfg_.frame_size, "stft",
            "signal too short: " << signal.size() << " < " << cfg_.frame_size);
  const int t = cfg_.NumFrames(signal.size());
  Eigen::MatrixXd frames(cfg_.frame_size, t);
  for (int i = 0; i < t; ++i)
    frames.col(i) =
        signal.segment(static_cast<int64_t>(i) * cfg_.hop, cfg_.frame_size);
  return frames;
}

RiSpectrogram StftEngine::Forward(const Wave& signal) const {
  MultiWave mw;
  mw.sample_rate = cfg_.sample_rate;
  mw.samples.resize(1, signal.size());
  mw.samples.row(0) = signal.transpose();
  return Forward(mw);
}

RiSpectrogram StftEngine::Forward(const MultiWave& signal) const {
  const int ch = signal.channels();
  const int t = cfg_.NumFrames(signal.num_samples());
  const int k = cfg_.bins_kept;

  RiSpectrogram spec;
  spec.config = cfg_;
  spec.data = nn::Tensor({2 * ch, k, t});
  for (int c = 0; c < ch; ++c) {
    Eigen::MatrixXd frames = FrameSignal(signal.channel(c));
    Eigen::MatrixXd re = dft_re_ * frames;  // (k, t)
    Eigen::MatrixXd im = dft_im_ * frames;
    for (int b = 0; b < k; ++b)
      for (int i = 0; i < t; ++i) {
        spec.data.at(c, b, i) = re(b, i);
        spec.data.at(ch + c, b, i) = im(b, i);
      }
  }
  return spec;
}

Wave StftEngine::Synthesize(const nn::Tensor& ri) const {
  TSX_CHECK(ri.rank() == 3 && ri.dim(0) == 2 && ri.dim(1) == cfg_.bins_kept,
            "istft", "expected (2," << cfg_.bins_kept << ",T) tensor, got "
                         << ri.ShapeStr());
  const int t = ri.dim(2);
  const int k = cfg_.bins_kept;
  const int n = cfg_.frame_size;
  const int64_t out_len = cfg_.NumSamples(t);

  Wave num = Wave::Zero(out_len);
  Wave den = Wave::Zero(out_len);
  Eigen::VectorXd re(k), im(k);
  for (int i = 0; i < t; ++i) {
    for (int b = 0; b < k; ++b) {
      re[b] = ri.at(0, b, i);
      im[b] = ri.at(1, b, i);
    }
    Eigen::VectorXd frame = syn_re_ * re + syn_im_ * im;
    const int64_t off = static_cast<int64_t>(i) * cfg_.hop;
    for (int j = 0; j < n; ++j) {
      num[off + j] += window_[j] * frame[j];
      den[off + j] += window_[j] * window_[j];
    }
  }
  return num / den;
}

nn::Tensor StftEngine::SynthesizeAdjoint(const Wave& grad, int frames) const {
  const int k = cfg_.bins_kept;
  const int n = cfg_.frame_size;
  const int64_t out_len = cfg_.NumSamples(frames);
  TSX_CHECK(grad.size() == out_len, "istft",
            "gradient length mismatch: " << grad.size() << " vs " << out_len);

  Wave den = Wave::Zero(out_len);
  for (int i = 0; i < frames; ++i) {
    const int64_t off = static_cast<int64_t>(i) * cfg_.hop;
    for (int j = 0; j < n; ++j) den[off + j] += window_[j] * window_[j];
  }
  Wave gn = grad / den;

  nn::Tensor out({2, k, frames});
  Eigen::VectorXd fg(n);
  for (int i = 0; i < frames; ++i) {
    const int64_t off = static_cast<int64_t>(i) * cfg_.hop;
    for (int j = 0; j < n; ++j) fg[j] = window_[j] * gn[off + j];
    Eigen::VectorXd gre = syn_re_.transpose() * fg;
    Eigen::VectorXd gim = syn_im_.transpose() * fg;
    for (int b = 0; b < k; ++b) {
      out.at(0, b, i) = gre[b];
      out.at(1, b, i) = gim[b];
    }
  }
  return out;
}

Wave StftEngine::Inverse(const RiSpectrogram& spec) const {
  TSX_CHECK(spec.config.frame_size == cfg_.frame_size &&
                spec.config.hop == cfg_.hop &&
                spec.config.bins_kept == cfg_.bins_kept,
            "istft", "spectrogram config does not match engine config");
  TSX_CHECK(spec.channels() == 1, "istft",
            "synthesis expects a single-channel spectrogram, got "
                << spec.channels() << " channels");
  return Synthesize(spec.data);
}

void SaveTensor(const std::string& path, const nn::Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  TSX_CHECK(out.good(), "tensor-io", "cannot open " << path);
  out.write("TSXTEN1\n", 8);
  int32_t rank = t.rank();
  out.write(reinterpret_cast<const char*>(&rank), 4);
  for (int d : t.shape) {
    int32_t v = d;
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

nn::Tensor LoadTensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TSX_CHECK(in.good(), "tensor-io", "cannot open " << path);
  char magic[8];
  in.read(magic, 8);
  TSX_CHECK(std::memcmp(magic, "TSXTEN1\n", 8) == 0, "tensor-io",
            path << ": bad magic");
  int32_t rank = 0;
  in.read(reinterpret_cast<char*>(&rank), 4);
  std::vector<int> shape(rank);
  for (int i = 0; i < rank; ++i) {
    int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    shape[i] = v;
  }
  nn::Tensor t(shape);
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  TSX_CHECK(in.good(), "tensor-io", path << ": truncated tensor");
  return t;
}

}  // namespace tsx

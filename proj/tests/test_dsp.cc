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

#include <cmath>

#include "doctest.h"

#include "dsp/metrics.h"
#include "dsp/resample.h"
#include "dsp/stft.h"
#include "dsp/wav.h"
#include "test_util.h"

using namespace tsx;
using testutil::RandomWave;
using testutil::TempDir;

TEST_CASE("wav float32 round trip is lossless for all channels") {
  TempDir tmp("wav");
  MultiWave w;
  w.sample_rate = 8000;
  w.samples.resize(3, 1000);
  Rng rng(1);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 1000; ++i) w.samples(c, i) = 0.5 * rng.Normal();
  WriteWav(tmp.file("a.wav"), w, WavFormat::kFloat32);
  const MultiWave r = ReadWav(tmp.file("a.wav"));
  REQUIRE(r.channels() == 3);
  REQUIRE(r.num_samples() == 1000);
  CHECK(r.sample_rate == 8000);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 1000; ++i)
      CHECK(r.samples(c, i) ==
            static_cast<double>(static_cast<float>(w.samples(c, i))));
}

TEST_CASE("wav pcm16 round trip is within quantization error") {
  TempDir tmp("wav16");
  const Wave w = RandomWave(500, 2, 0.2);
  WriteWav(tmp.file("a.wav"), w, 8000, WavFormat::kPcm16);
  const MultiWave r = ReadWav(tmp.file("a.wav"));
  REQUIRE(r.num_samples() == 500);
  // Encoder scales by 32767 (rounded), decoder divides by 32768: the error
  // is at most (|x| + 0.5) / 32768.
  for (int i = 0; i < 500; ++i)
    CHECK(std::abs(r.samples(0, i) - w[i]) <=
          (std::abs(w[i]) + 0.5) / 32768.0 + 1e-12);
}

TEST_CASE("resampler: 8 kHz input is a bit-exact passthrough") {
  const Wave w = RandomWave(3000, 3);
  const Wave r = ResampleTo8k(w, 8000);
  REQUIRE(r.size() == w.size());
  for (int i = 0; i < 3000; ++i) CHECK(r[i] == w[i]);
}

TEST_CASE("resampler: 16 kHz tone keeps its frequency") {
  // 1 kHz tone sampled at 16 kHz; after resampling the 8 kHz signal must
  // still be a 1 kHz tone (compared against the analytic waveform).
  const int n16 = 16000;
  Wave w(n16);
  for (int i = 0; i < n16; ++i)
    w[i] = std::sin(2.0 * M_PI * 1000.0 * i / 16000.0);
  const Wave r = ResampleTo8k(w, 16000);
  REQUIRE(r.size() >= 7800);
  double dot = 0, na = 0, nb = 0;
  // Interior region only; the filter tails distort the edges.
  for (int i = 200; i < static_cast<int>(r.size()) - 200; ++i) {
    const double ideal = std::sin(2.0 * M_PI * 1000.0 * i / 8000.0);
    dot += r[i] * ideal;
    na += r[i] * r[i];
    nb += ideal * ideal;
  }
  CHECK(dot / std::sqrt(na * nb) > 0.999);
}

TEST_CASE("resampler: content above the anti-alias cutoff is attenuated") {
  // 7.5 kHz tone at 16 kHz would alias to 500 Hz without filtering.
  const int n16 = 16000;
  Wave w(n16);
  for (int i = 0; i < n16; ++i)
    w[i] = std::sin(2.0 * M_PI * 7500.0 * i / 16000.0);
  const Wave r = ResampleTo8k(w, 16000);
  double p = 0;
  for (int i = 200; i < static_cast<int>(r.size()) - 200; ++i) p += r[i] * r[i];
  p /= static_cast<double>(r.size() - 400);
  CHECK(p < 1e-4);  // input tone power is 0.5
}

TEST_CASE("stft frame count and sample count are inverse") {
  StftConfig cfg;
  CHECK(cfg.NumFrames(32000) == 249);
  CHECK(cfg.NumSamples(249) == 32000);
  CHECK(cfg.NumFrames(256) == 1);
  CHECK(cfg.NumSamples(1) == 256);
}

TEST_CASE("stft round trip: interior relative error < 1e-6") {
  const StftEngine engine;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Wave w = RandomWave(32000, 100 + seed);
    const RiSpectrogram spec = engine.Forward(w);
    REQUIRE(spec.frames() == 249);
    REQUIRE(spec.bins() == 129);
    const Wave r = engine.Inverse(spec);
    REQUIRE(r.size() == w.size());
    double err = 0, ref = 0;
    for (int i = 256; i < 32000 - 256; ++i) {
      err += (r[i] - w[i]) * (r[i] - w[i]);
      ref += w[i] * w[i];
    }
    CHECK(std::sqrt(err / ref) < 1e-6);
  }
}

TEST_CASE("stft synthesis adjoint: <S x, y> == <x, S^T y>") {
  const StftEngine engine;
  Rng rng(7);
  const int frames = 17;
  nn::Tensor x({2, 129, frames});
  for (double& v : x.data) v = rng.Normal();
  const Wave sx = engine.Synthesize(x);
  const Wave y = RandomWave(sx.size(), 8);
  const nn::Tensor sty = engine.SynthesizeAdjoint(y, frames);
  double lhs = 0;
  for (int64_t i = 0; i < sx.size(); ++i) lhs += sx[i] * y[i];
  double rhs = 0;
  for (int64_t i = 0; i < sty.numel(); ++i) rhs += x.data[i] * sty.data[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("tensor file round trip") {
  TempDir tmp("tensor");
  nn::Tensor x({3, 4, 5});
  Rng rng(9);
  for (double& v : x.data) v = rng.Normal();
  SaveTensor(tmp.file("x.ten"), x);
  const nn::Tensor y = LoadTensor(tmp.file("x.ten"));
  REQUIRE(y.shape == x.shape);
  for (int64_t i = 0; i < x.numel(); ++i) CHECK(y.data[i] == x.data[i]);
}

TEST_CASE("si-sdr: scale invariance is exact for power-of-two scaling") {
  const Wave ref = RandomWave(4000, 11);
  Wave est = RandomWave(4000, 12, 0.1);
  est += ref;
  const double a = SiSdr(est, ref);
  const double b = SiSdr(4.0 * est, ref);
  CHECK(a == b);
}

TEST_CASE("si-sdr: orthogonal equal-power noise gives exactly 0 dB") {
  const int n = 1024;
  Wave ref = Wave::Zero(n), noise = Wave::Zero(n);
  // Disjoint supports make the signals exactly orthogonal.
  for (int i = 0; i < n / 2; ++i) ref[i] = std::sin(0.1 * i) + 0.5;
  double p = 0;
  for (int i = 0; i < n; ++i) p += ref[i] * ref[i];
  for (int i = n / 2; i < n; ++i) noise[i] = 1.0;
  const double pn = static_cast<double>(n) / 2.0;
  noise *= std::sqrt(p / pn);
  const Wave est = ref + noise;
  CHECK(std::abs(SiSdr(est, ref)) < 1e-9);
}

TEST_CASE("si-sdr: clamped to +-60 dB") {
  const Wave ref = RandomWave(1000, 13);
  CHECK(SiSdr(ref, ref) == 60.0);
  CHECK(SiSdr(RandomWave(1000, 14), ref) >= -60.0);
}

TEST_CASE("si-sdr improvement of the mixture against itself is zero") {
  const Wave ref = RandomWave(1000, 15);
  const Wave mix = ref + RandomWave(1000, 16, 0.3);
  CHECK(SiSdrImprovement(mix, mix, ref) == 0.0);
}

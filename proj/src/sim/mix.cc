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

#include "sim/mix.h"

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "util/error.h"

namespace tsx {

MultiWave RenderSource(const Wave& dry, int sample_rate,
                       const ImpulseResponseSet& rirs) {
  TSX_CHECK(sample_rate == kSampleRate, "render",
            "dry signal must be 8 kHz, got " << sample_rate);
  TSX_CHECK(rirs.sample_rate == kSampleRate, "render", "RIR rate mismatch");
  TSX_CHECK(!rirs.rirs.empty(), "render", "empty RIR set");

  const int64_t n = dry.size();
  MultiWave out;
  out.sample_rate = kSampleRate;
  out.samples.resize(static_cast<int>(rirs.rirs.size()), n);

  // FFT convolution, truncated to the dry length. The dry spectrum is shared
  // across microphones.
  int64_t max_h = 0;
  for (const Wave& h : rirs.rirs) max_h = std::max<int64_t>(max_h, h.size());
  int64_t nfft = 1;
  while (nfft < n + max_h - 1) nfft <<= 1;

  Eigen::FFT<double> fft;
  std::vector<double> xt(nfft, 0.0);
  std::copy(dry.data(), dry.data() + n, xt.begin());
  std::vector<std::complex<double>> xf;
  fft.fwd(xf, xt);

  std::vector<double> ht(nfft), yt;
  std::vector<std::complex<double>> hf;
  for (size_t j = 0; j < rirs.rirs.size(); ++j) {
    const Wave& h = rirs.rirs[j];
    std::fill(ht.begin(), ht.end(), 0.0);
    std::copy(h.data(), h.data() + h.size(), ht.begin());
    fft.fwd(hf, ht);
    for (int64_t k = 0; k < nfft; ++k) hf[k] *= xf[k];
    fft.inv(yt, hf);
    for (int64_t i = 0; i < n; ++i)
      out.samples(static_cast<int>(j), i) = yt[i];
  }
  return out;
}

Wave TileCrop(const Wave& w, int64_t target_len) {
  TSX_CHECK(w.size() > 0, "tile-crop", "empty signal");
  if (w.size() >= target_len) return w.head(target_len);
  Wave out(target_len);
  for (int64_t i = 0; i < target_len; ++i) out[i] = w[i % w.size()];
  return out;
}

MixtureExample MixScene(const RoomScene& scene, const Wave& dry_desired,
                        const Wave& dry_interferer, const Wave& dry_noise) {
  TSX_CHECK(dry_desired.size() >= kSegmentSamples &&
                dry_interferer.size() >= kSegmentSamples &&
                dry_noise.size() >= kSegmentSamples,
            "mix", "dry signals must be at least 4 s at 8 kHz");
  const Wave d = dry_desired.head(kSegmentSamples);
  const Wave i = dry_interferer.head(kSegmentSamples);
  const Wave n = dry_noise.head(kSegmentSamples);
  TSX_CHECK(Power(d) > 0, "mix", "silent desired dry signal");

  MixtureExample ex;
  ex.scene = scene;
  ex.rendered_desired = RenderSource(d, kSampleRate, SimulateRir(scene, SourceTag::kDesired));
  ex.rendered_interferer =
      RenderSource(i, kSampleRate, SimulateRir(scene, SourceTag::kInterferer));
  ex.rendered_noise = RenderSource(n, kSampleRate, SimulateRir(scene, SourceTag::kNoise));

  const double pd = Power(ex.rendered_desired.channel(0));
  const double pi = Power(ex.rendered_interferer.channel(0));
  TSX_CHECK(pd > 0, "mix", "desired source renders to silence");

  // Interferer gain for the configured SIR at mic 1.
  double gi = 0.0;
  if (pi > 0) {
    gi = std::sqrt(pd / pi * std::pow(10.0, -scene.sir_db / 10.0));
  } else {
    ex.interferer_silent = true;
  }
  ex.rendered_interferer.samples *= gi;

  // Noise gain so that speech-sum vs noise at mic 1 hits mix_snr_db.
  const Wave speech_ch1 =
      ex.rendered_desired.channel(0) + ex.rendered_interferer.channel(0);
  const double ps = Power(speech_ch1);
  double gn = 0.0;
  if (std::isinf(scene.mix_snr_db)) {
    gn = 0.0;
  } else {
    const double pn = Power(ex.rendered_noise.channel(0));
    TSX_CHECK(pn > 0, "mix",
              "silent noise signal cannot satisfy the SNR constraint");
    gn = std::sqrt(ps / (pn * std::pow(10.0, scene.mix_snr_db / 10.0)));
  }
  ex.rendered_noise.samples *= gn;

  ex.mixture.sample_rate = kSampleRate;
  ex.mixture.samples = ex.rendered_desired.samples +
                       ex.rendered_interferer.samples +
                       ex.rendered_noise.samples;
  ex.target_reverb = ex.rendered_desired.channel(0);
  ex.interferer_reverb = ex.rendered_interferer.channel(0);
  return ex;
}

}  // namespace tsx

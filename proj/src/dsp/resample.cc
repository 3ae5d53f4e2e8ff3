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

#include "dsp/resample.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "util/error.h"

namespace tsx {

namespace {

constexpr int kTargetRate = 8000;
constexpr double kCutoffHz = 0.45 * kTargetRate;
constexpr double kPi = 3.14159265358979323846;

double BesselI0(double x) {
  // Series expansion, converges quickly for the beta values used here.
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

// Kaiser-windowed sinc lowpass at the upsampled rate L * src_rate.
std::vector<double> DesignLowpass(int64_t up_rate, int taps_per_zero_crossing,
                                  int num_crossings, double beta) {
  const double fc = kCutoffHz / up_rate;  // cycles per upsampled sample
  const int half = taps_per_zero_crossing * num_crossings;
  const int n_taps = 2 * half + 1;
  std::vector<double> h(n_taps);
  const double i0b = BesselI0(beta);
  for (int i = 0; i < n_taps; ++i) {
    const double m = i - half;
    const double sinc =
        m == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * m) / (kPi * m);
    const double r = m / half;
    const double win = BesselI0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[i] = sinc * win;
  }
  return h;
}

}  // namespace

Wave ResampleTo8k(const Wave& signal, int src_rate) {
  TSX_CHECK(src_rate >= kTargetRate, "resample",
            "upsampling from " << src_rate << " Hz refused (need >= 8000)");
  if (src_rate == kTargetRate) return signal;

  const int64_t g = std::gcd(src_rate, kTargetRate);
  const int64_t up = kTargetRate / g;    // L
  const int64_t down = src_rate / g;     // M

  // Filter at rate src_rate * L; sinc spacing of the underlying 8 kHz designs
  // is down * up / ... : one "zero crossing" of the cutoff sinc spans roughly
  // up_rate / (2 * fc) samples; we anchor the tap grid on the upsample factor.
  const int64_t up_rate = static_cast<int64_t>(src_rate) * up;
  const int taps_per_cross = static_cast<int>(up_rate / kTargetRate);
  const std::vector<double> h = DesignLowpass(up_rate, taps_per_cross,
                                              /*num_crossings=*/100,
                                              /*beta=*/7.86);
  const int64_t n_taps = static_cast<int64_t>(h.size());
  const int64_t half = (n_taps - 1) / 2;
  const double gain = static_cast<double>(up);

  const int64_t n_in = signal.size();
  const int64_t n_out = (n_in * up) / down;
  Wave out(n_out);
  for (int64_t n = 0; n < n_out; ++n) {
    // Output sample n sits at upsampled index n * down; the filter is centered
    // there. Only every up-th upsampled sample is nonzero.
    const int64_t center = n * down;
    double acc = 0.0;
    // Upsampled index j = center - half + i must satisfy j % up == 0.
    int64_t j0 = center - half;
    int64_t rem = ((j0 % up) + up) % up;
    int64_t i = rem == 0 ? 0 : up - rem;
    for (; i < n_taps; i += up) {
      const int64_t j = (j0 + i) / up;  // source-sample index
      if (j < 0 || j >= n_in) continue;
      acc += h[i] * signal[j];
    }
    out[n] = gain * acc;
  }
  return out;
}

}  // namespace tsx

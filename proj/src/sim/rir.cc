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

#include "sim/rir.h"

#include <cmath>

#include "util/error.h"

namespace tsx {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Core image-method accumulation for one source and a set of receivers.
std::vector<Wave> ImageMethod(const Eigen::Vector3d& L,
                              const Eigen::Vector3d& src,
                              const std::vector<Eigen::Vector3d>& mics,
                              double beta, int64_t n_taps) {
  const int fs = kSampleRate;
  const double reach = kSpeedOfSound * static_cast<double>(n_taps) / fs;
  const int nx = beta > 0 ? static_cast<int>(std::ceil(reach / (2 * L.x()))) : 0;
  const int ny = beta > 0 ? static_cast<int>(std::ceil(reach / (2 * L.y()))) : 0;
  const int nz = beta > 0 ? static_cast<int>(std::ceil(reach / (2 * L.z()))) : 0;

  std::vector<Wave> rirs(mics.size(), Wave::Zero(n_taps));
  for (size_t j = 0; j < mics.size(); ++j) {
    const Eigen::Vector3d& mic = mics[j];
    Wave& h = rirs[j];
    for (int mx = -nx; mx <= nx; ++mx)
      for (int my = -ny; my <= ny; ++my)
        for (int mz = -nz; mz <= nz; ++mz)
          for (int q = 0; q < 8; ++q) {
            const int qx = q & 1, qy = (q >> 1) & 1, qz = (q >> 2) & 1;
            const Eigen::Vector3d img(
                (1 - 2 * qx) * src.x() - mic.x() + 2.0 * mx * L.x(),
                (1 - 2 * qy) * src.y() - mic.y() + 2.0 * my * L.y(),
                (1 - 2 * qz) * src.z() - mic.z() + 2.0 * mz * L.z());
            const double dist = img.norm();
            const int64_t tap =
                static_cast<int64_t>(std::lround(dist / kSpeedOfSound * fs));
            if (tap >= n_taps) continue;
            const int refl = std::abs(mx - qx) + std::abs(mx) +
                             std::abs(my - qy) + std::abs(my) +
                             std::abs(mz - qz) + std::abs(mz);
            if (beta == 0.0 && refl > 0) continue;
            const double amp =
                std::pow(beta, refl) / (4.0 * kPi * std::max(dist, 1e-3));
            h[tap] += amp;
          }
  }
  return rirs;
}

// Reflection coefficient whose *measured* decay hits the target RT60.
// Starts from the Eyring inversion and applies up to three fixed-point
// corrections on a probe response between two pinned off-center points
// (depends only on the room, so every source in the scene gets the same
// walls). Raising beta to the power (measured/target) rescales every image's
// attenuation in dB by that factor, so the iteration converges quickly.
double CalibratedBeta(const Eigen::Vector3d& L, double rt60) {
  const double volume = L.x() * L.y() * L.z();
  const double surface = 2.0 * (L.x() * L.y() + L.x() * L.z() + L.y() * L.z());
  const double absorption =
      std::min(1.0, 1.0 - std::exp(-0.161 * volume / (surface * rt60)));
  double beta = std::sqrt(1.0 - absorption);
  if (beta <= 0.0) return beta;

  const Eigen::Vector3d probe_src(0.37 * L.x(), 0.41 * L.y(), 0.53 * L.z());
  const Eigen::Vector3d probe_mic(0.61 * L.x(), 0.29 * L.y(), 0.47 * L.z());
  const int64_t probe_taps =
      static_cast<int64_t>(std::lround(1.8 * rt60 * kSampleRate));
  for (int iter = 0; iter < 3; ++iter) {
    const std::vector<Wave> probe =
        ImageMethod(L, probe_src, {probe_mic}, beta, probe_taps);
    const double measured = MeasureRt60(probe[0]);
    if (std::abs(measured - rt60) / rt60 <= 0.05) break;
    beta = std::pow(beta, measured / rt60);
  }
  return beta;
}

}  // namespace

ImpulseResponseSet SimulateRir(const RoomScene& scene, SourceTag source) {
  const Eigen::Vector3d& L = scene.room_dims;
  TSX_CHECK(L.minCoeff() > 0, "rir", "zero-volume room");
  TSX_CHECK(scene.rt60 > 0, "rir", "non-positive RT60");

  Eigen::Vector3d src;
  switch (source) {
    case SourceTag::kDesired: src = scene.desired_pos; break;
    case SourceTag::kInterferer: src = scene.interferer_pos; break;
    case SourceTag::kNoise: src = scene.noise_pos; break;
  }
  for (int i = 0; i < 3; ++i)
    TSX_CHECK(src[i] > 0 && src[i] < L[i], "rir", "source outside room");

  const double beta = CalibratedBeta(L, scene.rt60);

  const int fs = kSampleRate;
  const auto mics = scene.array.MicPositions();
  const double max_mic_dist = [&] {
    double m = 0;
    for (const auto& mic : mics) m = std::max(m, (src - mic).norm());
    return m;
  }();
  const int64_t direct_len =
      static_cast<int64_t>(std::lround(max_mic_dist / kSpeedOfSound * fs));
  const int64_t n_taps =
      std::max<int64_t>(direct_len + 64,
                        static_cast<int64_t>(std::lround(1.1 * scene.rt60 * fs)));

  ImpulseResponseSet out;
  out.source_tag = source;
  out.sample_rate = fs;
  out.rirs = ImageMethod(L, src, mics, beta, n_taps);
  return out;
}

double MeasureRt60(const Wave& rir, int sample_rate) {
  const int64_t n = rir.size();
  TSX_CHECK(n > 1, "rir", "empty impulse response");
  // Schroeder backward integration.
  Wave edc(n);
  double acc = 0.0;
  for (int64_t i = n - 1; i >= 0; --i) {
    acc += rir[i] * rir[i];
    edc[i] = acc;
  }
  TSX_CHECK(acc > 0, "rir", "zero-energy impulse response");
  Wave db = 10.0 * (edc / acc).log10();

  int64_t i5 = -1, i25 = -1;
  for (int64_t i = 0; i < n; ++i) {
    if (i5 < 0 && db[i] <= -5.0) i5 = i;
    if (i25 < 0 && db[i] <= -25.0) {
      i25 = i;
      break;
    }
  }
  TSX_CHECK(i5 >= 0 && i25 > i5, "rir", "decay curve never reaches -25 dB");

  // Least-squares line fit of db over [i5, i25].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int64_t m = i25 - i5 + 1;
  for (int64_t i = i5; i <= i25; ++i) {
    const double x = static_cast<double>(i - i5);
    sx += x;
    sy += db[i];
    sxx += x * x;
    sxy += x * db[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);  // dB/sample
  TSX_CHECK(slope < 0, "rir", "non-decaying energy curve");
  return -60.0 / slope / sample_rate;
}

int64_t FirstTapIndex(const Wave& rir) {
  const double peak = rir.abs().maxCoeff();
  TSX_CHECK(peak > 0, "rir", "all-zero impulse response");
  for (int64_t i = 0; i < rir.size(); ++i)
    if (std::abs(rir[i]) > 1e-4 * peak) return i;
  return rir.size();
}

}  // namespace tsx

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

#include "data/example.h"
#include "sim/mix.h"
#include "sim/rir.h"
#include "sim/scene.h"
#include "test_util.h"

using namespace tsx;
using testutil::RandomWave;

TEST_CASE("doa grid bijection over all 91 points") {
  for (int bin = 0; bin < kDoaGridBins; ++bin) {
    const int deg = BinToDoa(bin);
    CHECK(DoaToBin(deg) == bin);
    CHECK(deg >= 0);
    CHECK(deg <= 180);
  }
}

TEST_CASE("position from doa projects back to the same doa") {
  ArrayGeometry array;
  array.center = Eigen::Vector3d(3, 3, 1.5);
  for (int az = 0; az < 360; az += 45) {
    array.axis_azimuth_deg = az;
    for (int deg = 0; deg <= 180; deg += 14) {
      const Eigen::Vector3d p = PositionFromDoa(array, deg, 2.0);
      CHECK(DoaOf(p, array) == deg);
    }
  }
}

TEST_CASE("mic positions: collinear, symmetric, correctly spaced") {
  ArrayGeometry array;
  array.center = Eigen::Vector3d(1, 2, 1.5);
  array.axis_azimuth_deg = 30.0;
  const auto mics = array.MicPositions();
  REQUIRE(mics.size() == 4);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& m : mics) sum += m;
  CHECK((sum / 4 - array.center).norm() < 1e-12);
  for (size_t i = 1; i < mics.size(); ++i)
    CHECK(std::abs((mics[i] - mics[i - 1]).norm() - 0.08) < 1e-12);
  const Eigen::Vector3d d0 = (mics[1] - mics[0]).normalized();
  for (size_t i = 2; i < mics.size(); ++i)
    CHECK(((mics[i] - mics[i - 1]).normalized() - d0).norm() < 1e-12);
}

TEST_CASE("scene sampler: determinism and constraint enforcement") {
  SceneConfig cfg;
  cfg.forced_doa_gap_deg = 10;
  cfg.distinct_radii = true;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const RoomScene a = SampleRoomScene(seed, cfg);
    const RoomScene b = SampleRoomScene(seed, cfg);
    CHECK(a == b);
    a.Validate(cfg);
    CHECK(std::abs(a.desired_doa_deg - a.interferer_doa_deg) == 10);
    CHECK(std::abs(a.desired_radius - a.interferer_radius) >= 0.3);
    CHECK(a.rt60 >= cfg.rt60_min);
    CHECK(a.rt60 <= cfg.rt60_max);
  }
}

TEST_CASE("rir: direct-path delay matches the geometry within one sample") {
  SceneConfig cfg;
  for (uint64_t seed = 100; seed < 150; ++seed) {
    const RoomScene scene = SampleRoomScene(seed, cfg);
    const ImpulseResponseSet rirs = SimulateRir(scene, SourceTag::kDesired);
    const auto mics = scene.array.MicPositions();
    REQUIRE(rirs.rirs.size() == mics.size());
    for (size_t j = 0; j < mics.size(); ++j) {
      const double dist = (scene.desired_pos - mics[j]).norm();
      const double expected = dist / kSpeedOfSound * kSampleRate;
      CHECK(std::abs(FirstTapIndex(rirs.rirs[j]) - expected) <= 1.0);
    }
  }
}

TEST_CASE("rir: measured rt60 within 20% of the target") {
  SceneConfig cfg;
  for (uint64_t seed : {7ULL, 21ULL, 42ULL, 77ULL}) {
    const RoomScene scene = SampleRoomScene(seed, cfg);
    const ImpulseResponseSet rirs = SimulateRir(scene, SourceTag::kDesired);
    const double measured = MeasureRt60(rirs.rirs[0]);
    CHECK(std::abs(measured - scene.rt60) / scene.rt60 < 0.2);
  }
}

TEST_CASE("tile-crop: exact crop and periodic tiling") {
  const Wave w = RandomWave(10000, 5);
  const Wave c = TileCrop(w);
  REQUIRE(c.size() == kSegmentSamples);
  for (int i = 0; i < 10000; ++i) CHECK(c[i] == w[i]);
  for (int i = 10000; i < kSegmentSamples; ++i) CHECK(c[i] == w[i % 10000]);
  const Wave big = RandomWave(40000, 6);
  const Wave c2 = TileCrop(big);
  REQUIRE(c2.size() == kSegmentSamples);
  for (int i = 0; i < kSegmentSamples; ++i) CHECK(c2[i] == big[i]);
}

TEST_CASE("mix: exact decomposition and configured level ratios") {
  SceneConfig cfg;
  const RoomScene scene = SampleRoomScene(1234, cfg);
  const Wave d = TileCrop(RandomWave(32000, 1));
  const Wave i = TileCrop(RandomWave(32000, 2));
  const Wave n = GaussianNoise(kSegmentSamples, 3);
  const MixtureExample ex = MixScene(scene, d, i, n);

  REQUIRE(ex.mixture.channels() == 4);
  REQUIRE(ex.mixture.num_samples() == kSegmentSamples);

  // The mixture is the exact sum of the scaled rendered components.
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < kSegmentSamples; ++s) {
      const double sum = ex.rendered_desired.samples(c, s) +
                         ex.rendered_interferer.samples(c, s) +
                         ex.rendered_noise.samples(c, s);
      CHECK(ex.mixture.samples(c, s) == doctest::Approx(sum).epsilon(1e-12));
    }

  // SIR at mic 1.
  const double pd = Power(ex.rendered_desired.channel(0));
  const double pi = Power(ex.rendered_interferer.channel(0));
  CHECK(10.0 * std::log10(pd / pi) ==
        doctest::Approx(scene.sir_db).epsilon(1e-9));

  // Speech-sum to noise ratio at mic 1.
  const Wave speech =
      ex.rendered_desired.channel(0) + ex.rendered_interferer.channel(0);
  const double pn = Power(ex.rendered_noise.channel(0));
  CHECK(10.0 * std::log10(Power(speech) / pn) ==
        doctest::Approx(scene.mix_snr_db).epsilon(1e-9));

  // Targets are the rendered sources at mic 1.
  for (int s = 0; s < kSegmentSamples; ++s) {
    CHECK(ex.target_reverb[s] == ex.rendered_desired.samples(0, s));
    CHECK(ex.interferer_reverb[s] == ex.rendered_interferer.samples(0, s));
  }
}

TEST_CASE("mix: deterministic for identical inputs") {
  SceneConfig cfg;
  const RoomScene scene = SampleRoomScene(55, cfg);
  const Wave d = TileCrop(RandomWave(32000, 10));
  const Wave i = TileCrop(RandomWave(32000, 11));
  const Wave n = GaussianNoise(kSegmentSamples, 12);
  const MixtureExample a = MixScene(scene, d, i, n);
  const MixtureExample b = MixScene(scene, d, i, n);
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < kSegmentSamples; ++s)
      CHECK(a.mixture.samples(c, s) == b.mixture.samples(c, s));
}

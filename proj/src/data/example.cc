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

#include "data/example.h"

#include <cmath>

#include "data/corpus.h"
#include "sim/rir.h"
#include "util/error.h"

namespace tsx {

Wave GaussianNoise(int64_t samples, uint64_t seed) {
  Rng rng(seed ^ 0x901e4dULL);
  Wave w(samples);
  for (int64_t i = 0; i < samples; ++i) w[i] = rng.Normal();
  return w;
}

Wave CorruptEnrollmentSnr(const Wave& signal, double snr_db, uint64_t seed) {
  const double ps = Power(signal);
  TSX_CHECK(ps > 0, "corrupt-enroll", "zero signal cannot define an SNR");
  Rng rng(seed ^ 0x715eULL);
  Wave noise(signal.size());
  for (Eigen::Index i = 0; i < signal.size(); ++i) noise[i] = rng.Normal();
  const double pn = Power(noise);
  const double gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  return signal + gain * noise;
}

void MakeTrainingExample(const ManifestRecord& record, const SceneConfig& cfg,
                         MixtureExample* example, EnrollmentBundle* bundle) {
  const RoomScene scene = SampleRoomScene(record.scene_seed, cfg);
  const Wave dry_desired = TileCrop(LoadUtterance8k(record.mix_utt));
  const Wave dry_interferer = TileCrop(LoadUtterance8k(record.interferer_utt));
  const Wave dry_noise =
      record.noise_path.empty()
          ? GaussianNoise(kSegmentSamples, record.noise_seed)
          : TileCrop(LoadUtterance8k(record.noise_path));
  *example = MixScene(scene, dry_desired, dry_interferer, dry_noise);

  // Enrollments are rendered through the desired source's RIR (same room,
  // same position), mic 1.
  const ImpulseResponseSet desired_rir = SimulateRir(scene, SourceTag::kDesired);
  const Wave dry_enroll = TileCrop(LoadUtterance8k(record.enroll_utt));
  const Wave dry_rnd = TileCrop(LoadUtterance8k(record.rnd_utt));
  bundle->spectral_ref =
      RenderSource(dry_enroll, kSampleRate, desired_rir).channel(0);
  bundle->spectral_rnd =
      RenderSource(dry_rnd, kSampleRate, desired_rir).channel(0);
  bundle->doa_deg = scene.desired_doa_deg;
  bundle->doa_rnd_deg = record.doa_rnd_deg;
  TSX_CHECK(std::abs(bundle->doa_rnd_deg - bundle->doa_deg) >= 6,
            "example", "erroneous DOA " << bundle->doa_rnd_deg
                << " is inside the exclusion zone of " << bundle->doa_deg);
}

void MakeMirroredTrainingExample(const ManifestRecord& record,
                                 const SceneConfig& cfg,
                                 const SpeakerCorpus& corpus,
                                 MixtureExample* example,
                                 EnrollmentBundle* bundle) {
  MakeTrainingExample(record, cfg, example, bundle);

  // Swap the roles in the realized example; the mixture is untouched.
  std::swap(example->target_reverb, example->interferer_reverb);
  std::swap(example->rendered_desired, example->rendered_interferer);
  RoomScene& scene = example->scene;
  std::swap(scene.desired_pos, scene.interferer_pos);
  std::swap(scene.desired_doa_deg, scene.interferer_doa_deg);
  std::swap(scene.desired_radius, scene.interferer_radius);

  // Enroll the new target with an utterance not used in the mixture.
  const auto it = corpus.speakers.find(record.interferer_speaker);
  TSX_CHECK(it != corpus.speakers.end(), "example",
            "mirrored enrollment: speaker " << record.interferer_speaker
                                            << " not in the corpus");
  std::string enroll_utt = it->second.utterances.front();
  for (const std::string& u : it->second.utterances)
    if (u != record.interferer_utt) { enroll_utt = u; break; }

  const ImpulseResponseSet rir = SimulateRir(scene, SourceTag::kDesired);
  bundle->spectral_ref =
      RenderSource(TileCrop(LoadUtterance8k(enroll_utt)), kSampleRate, rir)
          .channel(0);
  bundle->spectral_rnd =
      RenderSource(TileCrop(LoadUtterance8k(record.rnd_utt)), kSampleRate, rir)
          .channel(0);
  bundle->doa_deg = scene.desired_doa_deg;

  // Fresh erroneous DOA for the mirrored target, pinned by the scene seed.
  Rng rng(record.scene_seed ^ 0x3137a2ULL);
  for (;;) {
    const int theta = 2 * static_cast<int>(rng.UniformInt(0, 90));
    if (std::abs(theta - bundle->doa_deg) >= 6) {
      bundle->doa_rnd_deg = theta;
      break;
    }
  }
}

std::vector<Scenario> MakeScenarios(const EnrollmentBundle& bundle) {
  return {
      {&bundle.spectral_ref, bundle.doa_deg, ScenarioLabel::kBothValid},
      {&bundle.spectral_ref, bundle.doa_rnd_deg, ScenarioLabel::kSpectralOnlyValid},
      {&bundle.spectral_rnd, bundle.doa_deg, ScenarioLabel::kSpatialOnlyValid},
  };
}

}  // namespace tsx

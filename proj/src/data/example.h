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

#ifndef TSX_DATA_EXAMPLE_H_
#define TSX_DATA_EXAMPLE_H_

#include <vector>

#include "data/manifest.h"
#include "sim/mix.h"

namespace tsx {

// Scenario categories; values double as classifier labels.
enum class ScenarioLabel {
  kBothValid = 0,
  kSpatialOnlyValid = 1,
  kSpectralOnlyValid = 2,
};

struct EnrollmentBundle {
  Wave spectral_ref;   // reverberant enrollment of the desired speaker, mic 1
  int doa_deg = 0;     // true desired DOA
  Wave spectral_rnd;   // wrong-speaker enrollment
  int doa_rnd_deg = 0; // erroneous DOA, >= 6 degrees from doa_deg
};

// One of the three training views of an example: which enrollment pair is
// presented and the matching class label. The reference waves alias the
// bundle; the bundle must outlive the scenario list.
struct Scenario {
  const Wave* spectral = nullptr;
  int theta_deg = 0;
  ScenarioLabel label = ScenarioLabel::kBothValid;
};

// Regenerates the mixture and nominal enrollment pinned by a manifest record.
// Pure function of (record, scene config).
void MakeTrainingExample(const ManifestRecord& record, const SceneConfig& cfg,
                         MixtureExample* example, EnrollmentBundle* bundle);

// Role-swapped view of the same record: the identical mixture with the
// interferer as the extraction target, enrolled with a held-out utterance of
// the interferer speaker (looked up in `corpus`). Pairing each record with
// its mirror makes the mixture alone ambiguous, so small training sets still
// force the network to consult the cues. Pure function of
// (record, scene config, corpus).
void MakeMirroredTrainingExample(const ManifestRecord& record,
                                 const SceneConfig& cfg,
                                 const SpeakerCorpus& corpus,
                                 MixtureExample* example,
                                 EnrollmentBundle* bundle);

// The three training scenarios in the canonical order:
// (e_d, theta_d) -> BothValid, (e_d, theta_rnd) -> SpectralOnlyValid,
// (e_rnd, theta_d) -> SpatialOnlyValid.
std::vector<Scenario> MakeScenarios(const EnrollmentBundle& bundle);

// Adds white Gaussian noise at exactly snr_db relative to the signal power.
Wave CorruptEnrollmentSnr(const Wave& signal, double snr_db, uint64_t seed);

// Unit-variance Gaussian noise segment (synthetic noise source / spatial-only
// enrollment stand-in).
Wave GaussianNoise(int64_t samples, uint64_t seed);

}  // namespace tsx

#endif  // TSX_DATA_EXAMPLE_H_

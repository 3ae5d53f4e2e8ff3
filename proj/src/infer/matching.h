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

#ifndef TSX_INFER_MATCHING_H_
#define TSX_INFER_MATCHING_H_

#include "model/doa_net.h"
#include "model/extractor.h"

namespace tsx {

// Spectral-only extraction: the DOA cue is replaced by a uniformly random
// grid angle (logged via *theta_used).
Wave ExtractSpectralOnly(ExtractorModel& model, const MultiWave& mixture,
                         const Wave& spectral_ref, uint64_t seed,
                         int* theta_used = nullptr);

// Spatial-only extraction: the spectral reference is replaced by
// unit-variance Gaussian noise of 4 s.
Wave ExtractSpatialOnly(ExtractorModel& model, const MultiWave& mixture,
                        int theta_deg, uint64_t seed);

struct MatchInput {
  MultiWave mixture;
  Wave ref1, ref2;        // spectral enrollments
  int theta1 = 0, theta2 = 0;  // grid DOAs
};

struct MatchResult {
  bool swapped = false;  // true pairs ref1 with theta2
  bool tie = false;
  double score_straight = 0, score_swapped = 0;
  // Intermediate extractions, persisted so both scores are recomputable.
  Wave spatial1, spatial2;    // spatial-only at theta1 / theta2
  Wave spectral1, spectral2;  // spectral-only with ref1 / ref2
};

struct PairingScores {
  double straight = 0, swapped = 0;
  bool swap_best = false;  // strictly larger swapped score
  bool tie = false;        // exact equality keeps the straight pairing
};

// The decision rule alone, on already-extracted waveforms: straight =
// SI-SDR(spatial1, spectral1) + SI-SDR(spatial2, spectral2), swapped crosses
// the references; the larger sum wins.
PairingScores DecidePairing(const Wave& spatial1, const Wave& spatial2,
                            const Wave& spectral1, const Wave& spectral2);

// Assignment between the DOAs and the spectral references via four
// single-cue extractions scored with DecidePairing.
MatchResult MatchPairs(ExtractorModel& model, const MatchInput& input,
                       uint64_t seed);

struct ExtractAllResult {
  DoaPick pick;
  MatchResult match;
  int theta_for_ref1 = 0, theta_for_ref2 = 0;
  Wave out1, out2;  // full two-cue extractions with the matched pairs
};

// Full pipeline: estimate the two DOAs from the mixture, match them to the
// references, then run the two final extractions with the matched cues.
ExtractAllResult ExtractAll(ExtractorModel& model, DoaNet& doa_model,
                            const MultiWave& mixture, const Wave& ref1,
                            const Wave& ref2, uint64_t seed);

}  // namespace tsx

#endif  // TSX_INFER_MATCHING_H_

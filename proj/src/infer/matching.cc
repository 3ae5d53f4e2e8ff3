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

#include "infer/matching.h"

#include "data/example.h"
#include "dsp/metrics.h"
#include "sim/mix.h"

namespace tsx {

Wave ExtractSpectralOnly(ExtractorModel& model, const MultiWave& mixture,
                         const Wave& spectral_ref, uint64_t seed,
                         int* theta_used) {
  Rng rng(seed ^ 0x5bec7ULL);
  const int theta = 2 * static_cast<int>(rng.UniformInt(0, 90));
  if (theta_used) *theta_used = theta;
  return model.Extract(mixture, spectral_ref, theta);
}

Wave ExtractSpatialOnly(ExtractorModel& model, const MultiWave& mixture,
                        int theta_deg, uint64_t seed) {
  const Wave noise_ref = GaussianNoise(kSegmentSamples, seed ^ 0x59a7ULL);
  return model.Extract(mixture, noise_ref, theta_deg);
}

PairingScores DecidePairing(const Wave& spatial1, const Wave& spatial2,
                            const Wave& spectral1, const Wave& spectral2) {
  PairingScores s;
  s.straight = SiSdr(spatial1, spectral1) + SiSdr(spatial2, spectral2);
  s.swapped = SiSdr(spatial1, spectral2) + SiSdr(spatial2, spectral1);
  if (s.straight == s.swapped)
    s.tie = true;
  else
    s.swap_best = s.swapped > s.straight;
  return s;
}

MatchResult MatchPairs(ExtractorModel& model, const MatchInput& input,
                       uint64_t seed) {
  TSX_CHECK(Power(input.ref1) > 0 && Power(input.ref2) > 0, "match",
            "spectral references must be nonzero");
  Rng rng(seed ^ 0xa7c4ULL);
  MatchResult r;
  r.spatial1 = ExtractSpatialOnly(model, input.mixture, input.theta1, rng.Next());
  r.spatial2 = ExtractSpatialOnly(model, input.mixture, input.theta2, rng.Next());
  r.spectral1 = ExtractSpectralOnly(model, input.mixture, input.ref1, rng.Next());
  r.spectral2 = ExtractSpectralOnly(model, input.mixture, input.ref2, rng.Next());

  const PairingScores s =
      DecidePairing(r.spatial1, r.spatial2, r.spectral1, r.spectral2);
  r.score_straight = s.straight;
  r.score_swapped = s.swapped;
  r.tie = s.tie;
  r.swapped = s.swap_best;
  return r;
}

ExtractAllResult ExtractAll(ExtractorModel& model, DoaNet& doa_model,
                            const MultiWave& mixture, const Wave& ref1,
                            const Wave& ref2, uint64_t seed) {
  ExtractAllResult out;
  out.pick = PickTwoDoas(doa_model.Probs(mixture));
  MatchInput mi;
  mi.mixture = mixture;
  mi.ref1 = ref1;
  mi.ref2 = ref2;
  mi.theta1 = out.pick.theta_a;
  mi.theta2 = out.pick.theta_b;
  out.match = MatchPairs(model, mi, seed);
  out.theta_for_ref1 = out.match.swapped ? mi.theta2 : mi.theta1;
  out.theta_for_ref2 = out.match.swapped ? mi.theta1 : mi.theta2;
  out.out1 = model.Extract(mixture, ref1, out.theta_for_ref1);
  out.out2 = model.Extract(mixture, ref2, out.theta_for_ref2);
  return out;
}

}  // namespace tsx

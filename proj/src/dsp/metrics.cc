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

#include "dsp/metrics.h"

#include <algorithm>
#include <cmath>

#include "util/error.h"

namespace tsx {

double SiSdr(const Wave& estimate, const Wave& reference) {
  TSX_CHECK(estimate.size() > 0, "si-sdr", "zero-length input");
  TSX_CHECK(estimate.size() == reference.size(), "si-sdr",
            "length mismatch: " << estimate.size() << " vs " << reference.size());
  const double ref_energy = reference.square().sum();
  TSX_CHECK(ref_energy > 0.0, "si-sdr", "reference is identically zero");

  const double alpha = (estimate * reference).sum() / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  const double err_energy = (alpha * reference - estimate).square().sum();

  if (err_energy <= 0.0) return kSiSdrClampDb;
  if (target_energy <= 0.0) return -kSiSdrClampDb;
  const double db = 10.0 * std::log10(target_energy / err_energy);
  return std::clamp(db, -kSiSdrClampDb, kSiSdrClampDb);
}

double SiSdrImprovement(const Wave& estimate, const Wave& mixture_ch1,
                        const Wave& reference) {
  return SiSdr(estimate, reference) - SiSdr(mixture_ch1, reference);
}

}  // namespace tsx

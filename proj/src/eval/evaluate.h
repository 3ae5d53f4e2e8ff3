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

#ifndef TSX_EVAL_EVALUATE_H_
#define TSX_EVAL_EVALUATE_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "data/testset.h"
#include "infer/matching.h"

namespace tsx {

// Inference variants. The ablation variants (spectral_only, spatial_only,
// proposed_no_3b) are evaluated on checkpoints trained with the matching
// recipe; proposed_doa_inference runs the full estimate-and-match pipeline.
enum class EvalVariant {
  kSpectralOnly,
  kSpatialOnly,
  kProposed,
  kProposedNo3b,
  kProposedDoaInference,
};

EvalVariant ParseEvalVariant(const std::string& name);
std::string EvalVariantName(EvalVariant v);

struct EvalRow {
  uint64_t seed = 0;
  double sisdri = 0;       // SI-SDRi of the extraction
  double sisdr = 0;        // raw SI-SDR of the extraction
  double unproc_sisdr = 0; // raw SI-SDR of mixture channel 1 (paper's
                           // "Unprocessed" convention; its SI-SDRi is 0)
  int class_pred = -1;     // argmax scenario class, -1 when unavailable
  bool pairing_correct = false;
  bool pairing_applicable = false;
};

struct EvalReport {
  std::string config, variant;
  std::string checkpoint_hash, settings_hash;
  uint64_t seed = 0;
  bool skipped = false;  // DOA-inference on SGM-RDR is marked not applicable
  std::vector<EvalRow> rows;

  double MeanSiSdri() const;
  double MedianSiSdri() const;
  double MeanUnprocessedSiSdr() const;

  void WriteCsv(const std::string& path) const;
  void WriteJson(const std::string& path) const;
};

// doa_model may be null unless variant == kProposedDoaInference.
EvalReport EvaluateTestset(ExtractorModel& model, DoaNet* doa_model,
                           const std::vector<TestExample>& test_set,
                           TestConfig config, EvalVariant variant,
                           uint64_t seed, const std::string& checkpoint_hash);

// ---- enrollment-angle sweep (two fixed speakers at 54 and 122 degrees,
// mixture SNR 20 dB) ----

struct SweepScene {
  MixtureExample mix;
  Wave ref1, ref2;        // correct spectral enrollments
  Wave target1, target2;  // reverberant sources at mic 1
};

SweepScene MakeSweepScene(const SpeakerCorpus& corpus, uint64_t seed,
                          double rt60 = 0.25);

struct SweepResult {
  std::vector<int> thetas;  // 0..180 step 2
  std::vector<double> sisdri1, sisdri2;
  std::vector<std::array<double, 3>> probs1, probs2;

  void WriteCsv(const std::string& path) const;
};

// For every grid angle theta, extract each speaker with its correct spectral
// reference and the enrollment DOA theta; records SI-SDRi and classifier
// probabilities.
SweepResult SweepTheta(ExtractorModel& model, const SweepScene& scene);

// Line plot of the sweep (SI-SDRi curves and speaker-1 class probabilities);
// pure function of the result.
void WriteSweepSvg(const std::string& path, const SweepResult& result,
                   const std::string& title);

// FNV-1a hex fingerprint of a string (settings hashes in reports).
std::string StringFingerprint(const std::string& s);

}  // namespace tsx

#endif  // TSX_EVAL_EVALUATE_H_

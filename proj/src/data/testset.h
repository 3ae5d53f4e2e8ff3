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

#ifndef TSX_DATA_TESTSET_H_
#define TSX_DATA_TESTSET_H_

#include <string>
#include <vector>

#include "data/corpus.h"
#include "data/example.h"

namespace tsx {

// The six evaluation configurations:
//   CSP      close speakers, DOA gap exactly 2 degrees, distinct radii
//   MSP      moderate separation, gap exactly 10 degrees
//   SGM      same-gender pair, random positions
//   SGM-RDR  SGM with an erroneous provided DOA (>= 6 degrees off)
//   SGM-RSR  SGM with a wrong-speaker spectral reference
//   SGM-LSSE SGM with the reference corrupted by white noise, SNR in [-2,2] dB
enum class TestConfig { kCsp, kMsp, kSgm, kSgmRdr, kSgmRsr, kSgmLsse };

TestConfig ParseTestConfig(const std::string& name);
std::string TestConfigName(TestConfig cfg);

struct TestExample {
  MixtureExample mix;
  Wave enroll_desired;     // the reference handed to the model (may be corrupt)
  Wave enroll_interferer;  // clean interferer reference, for DOA matching
  int provided_doa_deg = 0;
  int true_desired_doa_deg = 0;
  int interferer_doa_deg = 0;
  double enroll_snr_db = 0.0;  // LSSE only
  uint64_t seed = 0;
  bool doa_corrupted = false;
  bool ref_corrupted = false;
};

// Deterministic per (cfg, size, seed). SGM variants require gender labels on
// every corpus speaker.
std::vector<TestExample> MakeTestSet(TestConfig cfg, int size, uint64_t seed,
                                     const SpeakerCorpus& corpus,
                                     const SceneConfig& base);

}  // namespace tsx

#endif  // TSX_DATA_TESTSET_H_

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

#ifndef TSX_DATA_MANIFEST_H_
#define TSX_DATA_MANIFEST_H_

#include <string>
#include <vector>

#include "data/corpus.h"
#include "sim/scene.h"

namespace tsx {

// One fully pinned training/eval mixture: utterance paths, scene seed, and
// the erroneous-enrollment choices. Regenerating from a record is a pure
// function.
struct ManifestRecord {
  std::string split;  // "train" | "val" | "test"
  std::string desired_speaker, interferer_speaker, rnd_speaker;
  std::string mix_utt, enroll_utt, interferer_utt, rnd_utt;
  std::string noise_path;  // empty -> synthetic Gaussian noise
  uint64_t scene_seed = 0;
  uint64_t noise_seed = 0;
  int desired_doa_deg = 0;  // pinned from the sampled scene, for audits
  int doa_rnd_deg = 0;      // >= 6 degrees from desired_doa_deg

  nlohmann::json ToJson() const;
  static ManifestRecord FromJson(const nlohmann::json& j);
};

// JSON-lines file: first line a header object with the scene config and
// seed, then one record per line.
struct Manifest {
  SceneConfig scene_config;
  uint64_t seed = 0;
  std::vector<ManifestRecord> records;

  std::vector<ManifestRecord> Split(const std::string& split) const;
  void Save(const std::string& path) const;
  static Manifest LoadFile(const std::string& path);
};

// Speaker-disjoint split construction. Each nonempty split needs >= 3
// speakers (desired, interferer, and a wrong-speaker enrollment donor must
// be distinct within a split).
Manifest BuildManifest(const SpeakerCorpus& corpus,
                       const std::vector<std::string>& noise_files,
                       int n_train, int n_val, int n_test, uint64_t seed,
                       const SceneConfig& cfg);

}  // namespace tsx

#endif  // TSX_DATA_MANIFEST_H_

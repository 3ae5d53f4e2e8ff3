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

#include "data/manifest.h"

#include <fstream>

#include "util/error.h"

namespace tsx {

nlohmann::json ManifestRecord::ToJson() const {
  return {{"split", split},
          {"desired_speaker", desired_speaker},
          {"interferer_speaker", interferer_speaker},
          {"rnd_speaker", rnd_speaker},
          {"mix_utt", mix_utt},
          {"enroll_utt", enroll_utt},
          {"interferer_utt", interferer_utt},
          {"rnd_utt", rnd_utt},
          {"noise_path", noise_path},
          {"scene_seed", scene_seed},
          {"noise_seed", noise_seed},
          {"desired_doa_deg", desired_doa_deg},
          {"doa_rnd_deg", doa_rnd_deg}};
}

ManifestRecord ManifestRecord::FromJson(const nlohmann::json& j) {
  ManifestRecord r;
  r.split = j.at("split");
  r.desired_speaker = j.at("desired_speaker");
  r.interferer_speaker = j.at("interferer_speaker");
  r.rnd_speaker = j.at("rnd_speaker");
  r.mix_utt = j.at("mix_utt");
  r.enroll_utt = j.at("enroll_utt");
  r.interferer_utt = j.at("interferer_utt");
  r.rnd_utt = j.at("rnd_utt");
  r.noise_path = j.at("noise_path");
  r.scene_seed = j.at("scene_seed");
  r.noise_seed = j.at("noise_seed");
  r.desired_doa_deg = j.at("desired_doa_deg");
  r.doa_rnd_deg = j.at("doa_rnd_deg");
  return r;
}

std::vector<ManifestRecord> Manifest::Split(const std::string& split) const {
  std::vector<ManifestRecord> out;
  for (const ManifestRecord& r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

void Manifest::Save(const std::string& path) const {
  std::ofstream out(path);
  TSX_CHECK(out.good(), "manifest", "cannot open " << path << " for writing");
  out << nlohmann::json{{"scene_config", scene_config.ToJson()}, {"seed", seed}}
      << "\n";
  for (const ManifestRecord& r : records) out << r.ToJson() << "\n";
  TSX_CHECK(out.good(), "manifest", "short write to " << path);
}

Manifest Manifest::LoadFile(const std::string& path) {
  std::ifstream in(path);
  TSX_CHECK(in.good(), "manifest", "cannot open " << path);
  Manifest m;
  std::string line;
  TSX_CHECK(static_cast<bool>(std::getline(in, line)), "manifest",
            path << " is empty");
  nlohmann::json header = nlohmann::json::parse(line);
  m.scene_config = SceneConfig::FromJson(header.at("scene_config"));
  m.seed = header.at("seed");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    m.records.push_back(ManifestRecord::FromJson(nlohmann::json::parse(line)));
  }
  return m;
}

namespace {

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.UniformInt(0, static_cast<int64_t>(i) - 1)]);
}

int RandomErroneousDoa(int true_doa_deg, Rng& rng) {
  for (;;) {
    const int theta = 2 * static_cast<int>(rng.UniformInt(0, 90));
    if (std::abs(theta - true_doa_deg) >= 6) return theta;
  }
}

}  // namespace

Manifest BuildManifest(const SpeakerCorpus& corpus,
                       const std::vector<std::string>& noise_files,
                       int n_train, int n_val, int n_test, uint64_t seed,
                       const SceneConfig& cfg) {
  cfg.Validate();
  const std::vector<std::string> names = {"train", "val", "test"};
  const std::vector<int> counts = {n_train, n_val, n_test};
  int nonempty = 0;
  for (int c : counts) nonempty += c > 0 ? 1 : 0;
  TSX_CHECK(nonempty > 0, "manifest", "all split sizes are zero");

  std::vector<std::string> ids = corpus.SpeakerIds();
  TSX_CHECK(static_cast<int>(ids.size()) >= 3 * nonempty, "manifest",
            "speaker-disjoint splits need >= 3 speakers per nonempty split ("
                << 3 * nonempty << " total); corpus has " << ids.size());

  Rng rng(seed ^ 0x3a9fULL);
  Shuffle(ids, rng);

  // Every nonempty split starts with 3 speakers; leftovers go to the split
  // with the largest records-per-speaker pressure.
  std::vector<std::vector<std::string>> split_speakers(3);
  size_t next = 0;
  for (int s = 0; s < 3; ++s)
    if (counts[s] > 0)
      for (int k = 0; k < 3; ++k) split_speakers[s].push_back(ids[next++]);
  while (next < ids.size()) {
    int best = -1;
    double best_pressure = -1.0;
    for (int s = 0; s < 3; ++s) {
      if (counts[s] == 0) continue;
      const double pressure =
          static_cast<double>(counts[s]) / (split_speakers[s].size() + 1);
      if (pressure > best_pressure) {
        best_pressure = pressure;
        best = s;
      }
    }
    split_speakers[best].push_back(ids[next++]);
  }

  Manifest m;
  m.scene_config = cfg;
  m.seed = seed;
  for (int s = 0; s < 3; ++s) {
    if (counts[s] == 0) continue;
    std::vector<std::string> pool = split_speakers[s];
    std::sort(pool.begin(), pool.end());
    std::vector<std::string> enrollable;  // >= 2 utterances, can be desired
    for (const std::string& id : pool)
      if (corpus.speakers.at(id).utterances.size() >= 2)
        enrollable.push_back(id);
    TSX_CHECK(!enrollable.empty(), "manifest",
              "split '" << names[s]
                        << "' has no speaker with >= 2 utterances");

    Rng srng = rng.Fork(100 + s);
    for (int i = 0; i < counts[s]; ++i) {
      ManifestRecord r;
      r.split = names[s];
      r.desired_speaker =
          enrollable[srng.UniformInt(0, static_cast<int64_t>(enrollable.size()) - 1)];
      do {
        r.interferer_speaker =
            pool[srng.UniformInt(0, static_cast<int64_t>(pool.size()) - 1)];
      } while (r.interferer_speaker == r.desired_speaker);
      do {
        r.rnd_speaker =
            pool[srng.UniformInt(0, static_cast<int64_t>(pool.size()) - 1)];
      } while (r.rnd_speaker == r.desired_speaker ||
               r.rnd_speaker == r.interferer_speaker);

      const auto& du = corpus.speakers.at(r.desired_speaker).utterances;
      const int64_t mix_idx = srng.UniformInt(0, static_cast<int64_t>(du.size()) - 1);
      int64_t enr_idx;
      do {
        enr_idx = srng.UniformInt(0, static_cast<int64_t>(du.size()) - 1);
      } while (enr_idx == mix_idx);
      r.mix_utt = du[mix_idx];
      r.enroll_utt = du[enr_idx];
      const auto& iu = corpus.speakers.at(r.interferer_speaker).utterances;
      r.interferer_utt = iu[srng.UniformInt(0, static_cast<int64_t>(iu.size()) - 1)];
      const auto& ru = corpus.speakers.at(r.rnd_speaker).utterances;
      r.rnd_utt = ru[srng.UniformInt(0, static_cast<int64_t>(ru.size()) - 1)];
      if (!noise_files.empty())
        r.noise_path = noise_files[srng.UniformInt(
            0, static_cast<int64_t>(noise_files.size()) - 1)];
      r.scene_seed = srng.Next();
      r.noise_seed = srng.Next();
      r.desired_doa_deg = SampleRoomScene(r.scene_seed, cfg).desired_doa_deg;
      r.doa_rnd_deg = RandomErroneousDoa(r.desired_doa_deg, srng);
      m.records.push_back(std::move(r));
    }
  }
  return m;
}

}  // namespace tsx

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

#include "data/testset.h"

#include <cmath>

#include "sim/rir.h"
#include "util/error.h"

namespace tsx {

TestConfig ParseTestConfig(const std::string& name) {
  if (name == "CSP") return TestConfig::kCsp;
  if (name == "MSP") return TestConfig::kMsp;
  if (name == "SGM") return TestConfig::kSgm;
  if (name == "SGM-RDR") return TestConfig::kSgmRdr;
  if (name == "SGM-RSR") return TestConfig::kSgmRsr;
  if (name == "SGM-LSSE") return TestConfig::kSgmLsse;
  throw Error("testset", "unknown test configuration '" + name +
                             "' (expected CSP, MSP, SGM, SGM-RDR, SGM-RSR, "
                             "or SGM-LSSE)");
}

std::string TestConfigName(TestConfig cfg) {
  switch (cfg) {
    case TestConfig::kCsp: return "CSP";
    case TestConfig::kMsp: return "MSP";
    case TestConfig::kSgm: return "SGM";
    case TestConfig::kSgmRdr: return "SGM-RDR";
    case TestConfig::kSgmRsr: return "SGM-RSR";
    case TestConfig::kSgmLsse: return "SGM-LSSE";
  }
  throw Error("testset", "invalid test configuration value");
}

namespace {

bool IsSameGenderFamily(TestConfig cfg) {
  return cfg == TestConfig::kSgm || cfg == TestConfig::kSgmRdr ||
         cfg == TestConfig::kSgmRsr || cfg == TestConfig::kSgmLsse;
}

const std::string& PickId(const std::vector<std::string>& ids, Rng& rng) {
  return ids[rng.UniformInt(0, static_cast<int64_t>(ids.size()) - 1)];
}

const std::string& PickUtt(const SpeakerCorpus& corpus, const std::string& id,
                           Rng& rng) {
  const auto& u = corpus.speakers.at(id).utterances;
  return u[rng.UniformInt(0, static_cast<int64_t>(u.size()) - 1)];
}

// A different utterance of the same speaker than `exclude`.
const std::string& PickOtherUtt(const SpeakerCorpus& corpus,
                                const std::string& id,
                                const std::string& exclude, Rng& rng) {
  const auto& u = corpus.speakers.at(id).utterances;
  TSX_CHECK(u.size() >= 2, "testset",
            "speaker " << id << " needs >= 2 utterances");
  for (;;) {
    const std::string& pick =
        u[rng.UniformInt(0, static_cast<int64_t>(u.size()) - 1)];
    if (pick != exclude) return pick;
  }
}

}  // namespace

std::vector<TestExample> MakeTestSet(TestConfig cfg, int size, uint64_t seed,
                                     const SpeakerCorpus& corpus,
                                     const SceneConfig& base) {
  TSX_CHECK(size >= 1, "testset", "size must be positive");
  TSX_CHECK(corpus.speakers.size() >= 3, "testset",
            "need >= 3 speakers, corpus has " << corpus.speakers.size());
  const bool same_gender = IsSameGenderFamily(cfg);
  TSX_CHECK(!same_gender || corpus.HasGenders(), "testset",
            TestConfigName(cfg)
                << " needs gender labels for every corpus speaker");

  SceneConfig scfg = base;
  if (cfg == TestConfig::kCsp) {
    scfg.forced_doa_gap_deg = 2;
    scfg.distinct_radii = true;
  } else if (cfg == TestConfig::kMsp) {
    scfg.forced_doa_gap_deg = 10;
  }
  scfg.Validate();

  // Desired and interferer both need >= 2 utterances (mixture + enrollment).
  std::vector<std::string> enrollable;
  for (const auto& [id, s] : corpus.speakers)
    if (s.utterances.size() >= 2) enrollable.push_back(id);
  TSX_CHECK(enrollable.size() >= 2, "testset",
            "need >= 2 speakers with >= 2 utterances");

  Rng master(seed ^ 0x7e57ULL);
  std::vector<TestExample> out;
  out.reserve(size);
  for (int i = 0; i < size; ++i) {
    Rng rng = master.Fork(i);
    TestExample ex;
    ex.seed = rng.Next();

    std::string desired, interferer;
    for (int tries = 0;; ++tries) {
      TSX_CHECK(tries < 10000, "testset",
                "cannot find a speaker pair"
                    << (same_gender ? " of the same gender" : ""));
      desired = PickId(enrollable, rng);
      interferer = PickId(enrollable, rng);
      if (desired == interferer) continue;
      if (same_gender && corpus.speakers.at(desired).gender !=
                             corpus.speakers.at(interferer).gender)
        continue;
      break;
    }

    const RoomScene scene = SampleRoomScene(ex.seed, scfg);
    ex.true_desired_doa_deg = scene.desired_doa_deg;
    ex.interferer_doa_deg = scene.interferer_doa_deg;
    ex.provided_doa_deg = scene.desired_doa_deg;

    const std::string mix_utt = PickUtt(corpus, desired, rng);
    const std::string enr_utt = PickOtherUtt(corpus, desired, mix_utt, rng);
    const std::string int_utt = PickUtt(corpus, interferer, rng);
    const std::string int_enr_utt = PickOtherUtt(corpus, interferer, int_utt, rng);

    ex.mix = MixScene(scene, TileCrop(LoadUtterance8k(mix_utt)),
                      TileCrop(LoadUtterance8k(int_utt)),
                      GaussianNoise(kSegmentSamples, rng.Next()));

    const ImpulseResponseSet d_rir = SimulateRir(scene, SourceTag::kDesired);
    const ImpulseResponseSet i_rir = SimulateRir(scene, SourceTag::kInterferer);
    ex.enroll_desired = RenderSource(TileCrop(LoadUtterance8k(enr_utt)),
                                     kSampleRate, d_rir).channel(0);
    ex.enroll_interferer = RenderSource(TileCrop(LoadUtterance8k(int_enr_utt)),
                                        kSampleRate, i_rir).channel(0);

    if (cfg == TestConfig::kSgmRdr) {
      ex.doa_corrupted = true;
      do {
        ex.provided_doa_deg = 2 * static_cast<int>(rng.UniformInt(0, 90));
      } while (std::abs(ex.provided_doa_deg - ex.true_desired_doa_deg) < 6);
    } else if (cfg == TestConfig::kSgmRsr) {
      ex.ref_corrupted = true;
      std::string donor;
      do {
        donor = PickId(corpus.SpeakerIds(), rng);
      } while (donor == desired || donor == interferer);
      ex.enroll_desired =
          RenderSource(TileCrop(LoadUtterance8k(PickUtt(corpus, donor, rng))),
                       kSampleRate, d_rir).channel(0);
    } else if (cfg == TestConfig::kSgmLsse) {
      ex.ref_corrupted = true;
      ex.enroll_snr_db = rng.Uniform(-2.0, 2.0);
      ex.enroll_desired =
          CorruptEnrollmentSnr(ex.enroll_desired, ex.enroll_snr_db, rng.Next());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace tsx

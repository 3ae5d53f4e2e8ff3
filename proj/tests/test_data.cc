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

#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"

#include "data/example.h"
#include "data/manifest.h"
#include "data/testset.h"
#include "dsp/metrics.h"
#include "test_util.h"

using namespace tsx;
using testutil::TempDir;

namespace {

// One shared synthetic corpus for the whole binary.
const SpeakerCorpus& Corpus() {
  static TempDir* dir = new TempDir("corpus");
  static SpeakerCorpus corpus =
      GenerateSyntheticCorpus(dir->path(), 12, 2, 4.5, 7);
  return corpus;
}

SceneConfig FastScenes() {
  SceneConfig cfg;
  cfg.rt60_max = 0.3;  // short RIRs keep the suite quick
  return cfg;
}

}  // namespace

TEST_CASE("synthetic corpus: layout, genders, audio invariants") {
  const SpeakerCorpus& c = Corpus();
  REQUIRE(c.speakers.size() == 12);
  CHECK(c.HasGenders());
  std::set<char> genders;
  for (const auto& [id, s] : c.speakers) {
    CHECK(s.utterances.size() == 2);
    genders.insert(s.gender);
    const Wave w = LoadUtterance8k(s.utterances[0]);
    CHECK(w.size() == 36000);  // 4.5 s at 8 kHz
    CHECK(Power(w) > 1e-4);
  }
  CHECK(genders.count('M'));
  CHECK(genders.count('F'));
}

TEST_CASE("synthetic corpus: regeneration is deterministic") {
  TempDir d2("corpus2");
  const SpeakerCorpus c2 = GenerateSyntheticCorpus(d2.path(), 12, 2, 4.5, 7);
  const auto& base = *Corpus().speakers.begin();
  const auto& again = *c2.speakers.begin();
  const Wave a = LoadUtterance8k(base.second.utterances[1]);
  const Wave b = LoadUtterance8k(again.second.utterances[1]);
  REQUIRE(a.size() == b.size());
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("manifest: build is deterministic and splits are speaker-disjoint") {
  const Manifest m1 = BuildManifest(Corpus(), {}, 10, 5, 5, 3, FastScenes());
  const Manifest m2 = BuildManifest(Corpus(), {}, 10, 5, 5, 3, FastScenes());
  REQUIRE(m1.records.size() == 20);
  for (size_t i = 0; i < m1.records.size(); ++i)
    CHECK(m1.records[i].ToJson() == m2.records[i].ToJson());

  std::map<std::string, std::set<std::string>> by_split;
  for (const auto& r : m1.records) {
    by_split[r.split].insert(r.desired_speaker);
    by_split[r.split].insert(r.interferer_speaker);
    by_split[r.split].insert(r.rnd_speaker);
  }
  const std::vector<std::string> splits = {"train", "val", "test"};
  for (size_t a = 0; a < splits.size(); ++a)
    for (size_t b = a + 1; b < splits.size(); ++b)
      for (const auto& id : by_split[splits[a]])
        CHECK_FALSE(by_split[splits[b]].count(id));
}

TEST_CASE("manifest: per-record invariants") {
  const Manifest m = BuildManifest(Corpus(), {}, 12, 0, 0, 9, FastScenes());
  for (const auto& r : m.records) {
    CHECK(r.desired_speaker != r.interferer_speaker);
    CHECK(r.rnd_speaker != r.desired_speaker);
    CHECK(r.mix_utt != r.enroll_utt);
    CHECK(std::abs(r.doa_rnd_deg - r.desired_doa_deg) >= 6);
    CHECK(r.doa_rnd_deg % 2 == 0);
    CHECK(r.doa_rnd_deg >= 0);
    CHECK(r.doa_rnd_deg <= 180);
    // The pinned DOA matches the scene regenerated from the seed.
    const RoomScene scene = SampleRoomScene(r.scene_seed, m.scene_config);
    CHECK(scene.desired_doa_deg == r.desired_doa_deg);
  }
}

TEST_CASE("manifest: file round trip") {
  TempDir tmp("manifest");
  const Manifest m = BuildManifest(Corpus(), {}, 4, 3, 0, 11, FastScenes());
  m.Save(tmp.file("m.jsonl"));
  const Manifest r = Manifest::LoadFile(tmp.file("m.jsonl"));
  CHECK(r.seed == m.seed);
  CHECK(r.scene_config.ToJson() == m.scene_config.ToJson());
  REQUIRE(r.records.size() == m.records.size());
  for (size_t i = 0; i < m.records.size(); ++i)
    CHECK(r.records[i].ToJson() == m.records[i].ToJson());
  CHECK(r.Split("train").size() == 4);
  CHECK(r.Split("val").size() == 3);
}

TEST_CASE("manifest: too few speakers is refused with the constraint named") {
  TempDir d("tiny");
  const SpeakerCorpus tiny = GenerateSyntheticCorpus(d.path(), 5, 2, 4.2, 1);
  try {
    BuildManifest(tiny, {}, 4, 4, 0, 1, FastScenes());
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("3 speakers") != std::string::npos);
  }
}

TEST_CASE("example generation is a pure function of the record") {
  const Manifest m = BuildManifest(Corpus(), {}, 2, 0, 0, 21, FastScenes());
  MixtureExample e1, e2;
  EnrollmentBundle b1, b2;
  MakeTrainingExample(m.records[0], m.scene_config, &e1, &b1);
  MakeTrainingExample(m.records[0], m.scene_config, &e2, &b2);
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < kSegmentSamples; ++s)
      CHECK(e1.mixture.samples(c, s) == e2.mixture.samples(c, s));
  for (int s = 0; s < kSegmentSamples; ++s) {
    CHECK(b1.spectral_ref[s] == b2.spectral_ref[s]);
    CHECK(b1.spectral_rnd[s] == b2.spectral_rnd[s]);
  }
  CHECK(b1.doa_deg == m.records[0].desired_doa_deg);
  CHECK(b1.doa_rnd_deg == m.records[0].doa_rnd_deg);
  CHECK(Power(b1.spectral_ref) > 0);
  CHECK(Power(b1.spectral_rnd) > 0);
}

TEST_CASE("mirrored example: same mixture, roles swapped, fresh enrollment") {
  const Manifest m = BuildManifest(Corpus(), {}, 2, 0, 0, 21, FastScenes());
  const ManifestRecord& rec = m.records[0];
  MixtureExample e, me, me2;
  EnrollmentBundle b, mb, mb2;
  MakeTrainingExample(rec, m.scene_config, &e, &b);
  MakeMirroredTrainingExample(rec, m.scene_config, Corpus(), &me, &mb);
  MakeMirroredTrainingExample(rec, m.scene_config, Corpus(), &me2, &mb2);

  // The capture is identical; only the extraction target flips.
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < kSegmentSamples; ++s)
      CHECK(e.mixture.samples(c, s) == me.mixture.samples(c, s));
  for (int s = 0; s < kSegmentSamples; ++s) {
    CHECK(me.target_reverb[s] == e.interferer_reverb[s]);
    CHECK(me.interferer_reverb[s] == e.target_reverb[s]);
  }
  CHECK(me.scene.desired_doa_deg == e.scene.interferer_doa_deg);
  CHECK(me.scene.interferer_doa_deg == e.scene.desired_doa_deg);
  CHECK(mb.doa_deg == e.scene.interferer_doa_deg);
  CHECK(std::abs(mb.doa_rnd_deg - mb.doa_deg) >= 6);
  CHECK(mb.doa_rnd_deg % 2 == 0);

  // The mirrored enrollment must not reuse the in-mixture utterance: it is
  // the interferer speaker's held-out recording, so it cannot equal the
  // rendered interferer component up to scale.
  CHECK(Power(mb.spectral_ref) > 0);
  double dot = 0, pa = 0, pb = 0;
  const Wave& a = mb.spectral_ref;
  const Wave& t = me.target_reverb;
  for (int s = 0; s < kSegmentSamples; ++s) {
    dot += a[s] * t[s];
    pa += a[s] * a[s];
    pb += t[s] * t[s];
  }
  CHECK(dot * dot / (pa * pb) < 0.9);

  // Pure function of (record, config, corpus).
  for (int s = 0; s < kSegmentSamples; ++s) {
    CHECK(mb.spectral_ref[s] == mb2.spectral_ref[s]);
    CHECK(mb.spectral_rnd[s] == mb2.spectral_rnd[s]);
  }
  CHECK(mb.doa_rnd_deg == mb2.doa_rnd_deg);
}

TEST_CASE("scenarios: canonical order and labels") {
  EnrollmentBundle b;
  b.spectral_ref = testutil::RandomWave(100, 1);
  b.spectral_rnd = testutil::RandomWave(100, 2);
  b.doa_deg = 40;
  b.doa_rnd_deg = 120;
  const auto sc = MakeScenarios(b);
  REQUIRE(sc.size() == 3);
  CHECK(sc[0].spectral == &b.spectral_ref);
  CHECK(sc[0].theta_deg == 40);
  CHECK(sc[0].label == ScenarioLabel::kBothValid);
  CHECK(sc[1].spectral == &b.spectral_ref);
  CHECK(sc[1].theta_deg == 120);
  CHECK(sc[1].label == ScenarioLabel::kSpectralOnlyValid);
  CHECK(sc[2].spectral == &b.spectral_rnd);
  CHECK(sc[2].theta_deg == 40);
  CHECK(sc[2].label == ScenarioLabel::kSpatialOnlyValid);
}

TEST_CASE("enrollment corruption hits the requested snr exactly") {
  const Wave clean = testutil::RandomWave(32000, 31, 0.3);
  for (double snr : {-2.0, 0.0, 2.0}) {
    const Wave noisy = CorruptEnrollmentSnr(clean, snr, 77);
    const Wave noise = noisy - clean;
    const double measured = 10.0 * std::log10(Power(clean) / Power(noise));
    CHECK(measured == doctest::Approx(snr).epsilon(1e-9));
  }
  // High-SNR limit: output ~ input.
  const Wave nearly = CorruptEnrollmentSnr(clean, 60.0, 78);
  double dot = 0, na = 0, nb = 0;
  for (int i = 0; i < 32000; ++i) {
    dot += nearly[i] * clean[i];
    na += nearly[i] * nearly[i];
    nb += clean[i] * clean[i];
  }
  CHECK(dot / std::sqrt(na * nb) > 0.9999);
  // Determinism.
  const Wave again = CorruptEnrollmentSnr(clean, 60.0, 78);
  for (int i = 0; i < 32000; ++i) CHECK(again[i] == nearly[i]);
}

TEST_CASE("gaussian noise: unit variance, deterministic") {
  const Wave n1 = GaussianNoise(32000, 5);
  const Wave n2 = GaussianNoise(32000, 5);
  CHECK(std::abs(Power(n1) - 1.0) < 0.05);
  for (int i = 0; i < 32000; ++i) CHECK(n1[i] == n2[i]);
}

TEST_CASE("test sets: per-configuration invariants") {
  const SceneConfig base = FastScenes();
  const int size = 4;

  const auto csp = MakeTestSet(TestConfig::kCsp, size, 42, Corpus(), base);
  REQUIRE(csp.size() == size);
  for (const auto& ex : csp) {
    CHECK(std::abs(ex.true_desired_doa_deg - ex.interferer_doa_deg) == 2);
    CHECK(std::abs(ex.mix.scene.desired_radius -
                   ex.mix.scene.interferer_radius) >= 0.3);
    CHECK(ex.provided_doa_deg == ex.true_desired_doa_deg);
    CHECK_FALSE(ex.doa_corrupted);
    CHECK_FALSE(ex.ref_corrupted);
  }

  const auto msp = MakeTestSet(TestConfig::kMsp, size, 42, Corpus(), base);
  for (const auto& ex : msp)
    CHECK(std::abs(ex.true_desired_doa_deg - ex.interferer_doa_deg) == 10);

  const auto rdr = MakeTestSet(TestConfig::kSgmRdr, size, 42, Corpus(), base);
  for (const auto& ex : rdr) {
    CHECK(ex.doa_corrupted);
    CHECK(std::abs(ex.provided_doa_deg - ex.true_desired_doa_deg) >= 6);
  }

  const auto rsr = MakeTestSet(TestConfig::kSgmRsr, size, 42, Corpus(), base);
  for (const auto& ex : rsr) CHECK(ex.ref_corrupted);

  const auto lsse = MakeTestSet(TestConfig::kSgmLsse, size, 42, Corpus(), base);
  for (const auto& ex : lsse) {
    CHECK(ex.ref_corrupted);
    CHECK(ex.enroll_snr_db >= -2.0);
    CHECK(ex.enroll_snr_db <= 2.0);
  }
}

TEST_CASE("test sets: deterministic per (config, size, seed)") {
  const SceneConfig base = FastScenes();
  const auto a = MakeTestSet(TestConfig::kSgm, 3, 9, Corpus(), base);
  const auto b = MakeTestSet(TestConfig::kSgm, 3, 9, Corpus(), base);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == b[i].seed);
    for (int s = 0; s < kSegmentSamples; ++s)
      CHECK(a[i].mix.mixture.samples(0, s) == b[i].mix.mixture.samples(0, s));
  }
}

TEST_CASE("test sets: same-gender configs require gender labels") {
  TempDir d("nogender");
  SpeakerCorpus c = GenerateSyntheticCorpus(d.path(), 6, 2, 4.2, 2);
  std::filesystem::remove(d.path() + "/genders.txt");
  c = ScanCorpus({d.path()});
  CHECK_FALSE(c.HasGenders());
  CHECK_THROWS(MakeTestSet(TestConfig::kSgm, 2, 1, c, FastScenes()));
  // Position-based configs still work.
  CHECK_NOTHROW(MakeTestSet(TestConfig::kMsp, 1, 1, c, FastScenes()));
}

TEST_CASE("test config names round trip") {
  for (TestConfig cfg : {TestConfig::kCsp, TestConfig::kMsp, TestConfig::kSgm,
                         TestConfig::kSgmRdr, TestConfig::kSgmRsr,
                         TestConfig::kSgmLsse})
    CHECK(ParseTestConfig(TestConfigName(cfg)) == cfg);
  CHECK_THROWS(ParseTestConfig("nope"));
}

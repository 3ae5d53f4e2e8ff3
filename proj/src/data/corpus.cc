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

#include "data/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "dsp/resample.h"
#include "dsp/wav.h"
#include "sim/geometry.h"
#include "util/error.h"

namespace fs = std::filesystem;

namespace tsx {

std::vector<std::string> SpeakerCorpus::SpeakerIds() const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : speakers) ids.push_back(id);
  return ids;
}

bool SpeakerCorpus::HasGenders() const {
  for (const auto& [id, s] : speakers)
    if (s.gender == 'U') return false;
  return !speakers.empty();
}

SpeakerCorpus ScanCorpus(const std::vector<std::string>& roots) {
  SpeakerCorpus corpus;
  for (const std::string& root : roots) {
    TSX_CHECK(fs::is_directory(root), "corpus", root << " is not a directory");
    std::map<std::string, char> genders;
    const fs::path gfile = fs::path(root) / "genders.txt";
    if (fs::exists(gfile)) {
      std::ifstream in(gfile);
      std::string id, g;
      while (in >> id >> g)
        if (!g.empty() && (g[0] == 'M' || g[0] == 'F')) genders[id] = g[0];
    }
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& d : dirs) {
      const std::string id = d.filename().string();
      SpeakerCorpus::Speaker& spk = corpus.speakers[id];
      spk.id = id;
      auto it = genders.find(id);
      if (it != genders.end()) spk.gender = it->second;
      std::vector<std::string> utts;
      for (const auto& e : fs::directory_iterator(d))
        if (e.is_regular_file() && e.path().extension() == ".wav")
          utts.push_back(e.path().string());
      std::sort(utts.begin(), utts.end());
      spk.utterances.insert(spk.utterances.end(), utts.begin(), utts.end());
    }
  }
  for (auto it = corpus.speakers.begin(); it != corpus.speakers.end();)
    it = it->second.utterances.empty() ? corpus.speakers.erase(it) : ++it;
  return corpus;
}

namespace {

// Two-pole resonator, unity-ish gain at the resonance.
struct Resonator {
  double b0 = 1, a1 = 0, a2 = 0, y1 = 0, y2 = 0;
  Resonator(double freq_hz, double bw_hz, int fs) {
    const double r = std::exp(-M_PI * bw_hz / fs);
    const double w = 2.0 * M_PI * freq_hz / fs;
    a1 = 2.0 * r * std::cos(w);
    a2 = -r * r;
    b0 = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * w) + r * r);
  }
  double Tick(double x) {
    const double y = b0 * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

SpeakerCorpus GenerateSyntheticCorpus(const std::string& out_dir,
                                      int num_speakers, int utts_per_speaker,
                                      double seconds, uint64_t seed) {
  TSX_CHECK(num_speakers >= 1 && utts_per_speaker >= 2, "corpus",
            "need >= 1 speakers with >= 2 utterances each");
  TSX_CHECK(seconds > 0.5, "corpus", "utterances must be longer than 0.5 s");
  fs::create_directories(out_dir);
  const int fs_hz = kSampleRate;
  const int64_t n = static_cast<int64_t>(seconds * fs_hz);
  Rng master(seed ^ 0xc0ffee123ULL);

  std::ofstream genders(fs::path(out_dir) / "genders.txt");
  for (int sp = 0; sp < num_speakers; ++sp) {
    Rng srng = master.Fork(sp);
    const bool male = sp % 2 == 0;
    const double f0_base =
        male ? srng.Uniform(80.0, 140.0) : srng.Uniform(150.0, 220.0);
    const double f1 = srng.Uniform(300.0, 900.0);
    const double f2 = srng.Uniform(1000.0, 2400.0);
    const double bw1 = srng.Uniform(80.0, 160.0);
    const double bw2 = srng.Uniform(120.0, 260.0);

    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "spk%03d", sp);
    const fs::path sdir = fs::path(out_dir) / idbuf;
    fs::create_directories(sdir);
    genders << idbuf << " " << (male ? 'M' : 'F') << "\n";

    for (int u = 0; u < utts_per_speaker; ++u) {
      Rng urng = srng.Fork(1000 + u);
      const double vib_rate = urng.Uniform(4.0, 7.0);
      const double vib_depth = urng.Uniform(0.01, 0.04);
      const double am_rate = urng.Uniform(2.0, 5.0);
      const double am_phase = urng.Uniform(0.0, 2.0 * M_PI);
      const double drift = urng.Uniform(-0.1, 0.1);
      Resonator r1(f1, bw1, fs_hz), r2(f2, bw2, fs_hz);

      Wave w(n);
      double phase = urng.Uniform(0.0, 2.0 * M_PI);
      for (int64_t i = 0; i < n; ++i) {
        const double tt = static_cast<double>(i) / fs_hz;
        const double f0 =
            f0_base * (1.0 + drift * tt / seconds) *
            (1.0 + vib_depth * std::sin(2.0 * M_PI * vib_rate * tt));
        phase += 2.0 * M_PI * f0 / fs_hz;
        // Harmonic-rich glottal-like source below 3.5 kHz.
        double src = 0.0;
        const int hmax = static_cast<int>(3500.0 / f0);
        for (int h = 1; h <= hmax; ++h) src += std::sin(h * phase) / h;
        src += 0.02 * urng.Normal();
        const double voiced = r1.Tick(src) + 0.7 * r2.Tick(src);
        const double env = std::pow(
            0.55 + 0.45 * std::sin(2.0 * M_PI * am_rate * tt + am_phase), 2.0);
        w[i] = env * voiced;
      }
      const double rms = std::sqrt(Power(w));
      if (rms > 0) w *= 0.1 / rms;
      char ubuf[16];
      std::snprintf(ubuf, sizeof(ubuf), "utt%03d.wav", u);
      WriteWav((sdir / ubuf).string(), w, fs_hz);
    }
  }
  genders.close();
  return ScanCorpus({out_dir});
}

Wave LoadUtterance8k(const std::string& path) {
  MultiWave audio = ReadWav(path);
  TSX_CHECK(audio.channels() >= 1 && audio.num_samples() > 0, "corpus",
            path << " is empty");
  return ResampleTo8k(audio.channel(0), audio.sample_rate);
}

}  // namespace tsx

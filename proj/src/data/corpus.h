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

#ifndef TSX_DATA_CORPUS_H_
#define TSX_DATA_CORPUS_H_

#include <map>
#include <string>
#include <vector>

#include "dsp/audio.h"
#include "util/rng.h"

namespace tsx {

// Directory layout: <root>/<speaker-id>/<utt>.wav. Gender comes from an
// optional <root>/genders.txt with "<speaker-id> <M|F>" lines; speakers
// without an entry are 'U'.
struct SpeakerCorpus {
  struct Speaker {
    std::string id;
    std::vector<std::string> utterances;  // absolute/relative WAV paths
    char gender = 'U';                    // 'M', 'F', or 'U'
  };
  std::map<std::string, Speaker> speakers;

  std::vector<std::string> SpeakerIds() const;
  bool HasGenders() const;
};

SpeakerCorpus ScanCorpus(const std::vector<std::string>& roots);

// Speech-like synthetic fallback: per-speaker f0 class (gender proxy) and
// fixed formant resonators, per-utterance f0 contour and syllabic amplitude
// envelope. Writes 8 kHz mono WAVs plus genders.txt under out_dir and returns
// the scanned corpus.
SpeakerCorpus GenerateSyntheticCorpus(const std::string& out_dir,
                                      int num_speakers, int utts_per_speaker,
                                      double seconds, uint64_t seed);

// Reads a WAV, keeps channel 0, resamples to 8 kHz.
Wave LoadUtterance8k(const std::string& path);

}  // namespace tsx

#endif  // TSX_DATA_CORPUS_H_

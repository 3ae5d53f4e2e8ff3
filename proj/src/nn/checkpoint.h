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

#ifndef TSX_NN_CHECKPOINT_H_
#define TSX_NN_CHECKPOINT_H_

#include <string>

#include "json.hpp"

#include "nn/optim.h"
#include "nn/params.h"

namespace tsx {
namespace nn {

// Checkpoint layout: magic "TSXCKPT1\n", uint64 LE header length, JSON header
// listing tensors in order, then the raw float64 LE payload. Passing the
// optimizer includes its moment estimates and step count so training can
// resume exactly.
void SaveCheckpoint(const std::string& path, const ParamStore& store,
                    const AdamW* opt, const nlohmann::json& meta);

// Restores tensors into `store` (creating entries as needed) and, when `opt`
// is given and the file has optimizer state, the optimizer. Returns the meta
// block written at save time.
nlohmann::json LoadCheckpoint(const std::string& path, ParamStore* store,
                              AdamW* opt);

// Reads only the meta block (e.g. to reconstruct the model config before
// instantiating the model).
nlohmann::json ReadCheckpointMeta(const std::string& path);

// SHA-256-free content fingerprint: FNV-1a over the raw checkpoint bytes,
// hex-encoded. Used to stamp evaluation reports.
std::string FileFingerprint(const std::string& path);

}  // namespace nn
}  // namespace tsx

#endif  // TSX_NN_CHECKPOINT_H_

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

#ifndef TSX_SIM_SCENE_H_
#define TSX_SIM_SCENE_H_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "sim/geometry.h"

namespace tsx {

// Sampling ranges for random scenes. Serialized as a flat key-value JSON
// object; see docs in README for the schema.
struct SceneConfig {
  double rt60_min = 0.2, rt60_max = 0.8;          // seconds
  double snr_min = 5.0, snr_max = 20.0;           // dB, speech sum vs noise
  double radius_min = 1.0, radius_max = 4.0;      // meters
  double room_min_x = 4.0, room_max_x = 8.0;
  double room_min_y = 4.0, room_max_y = 8.0;
  double room_min_z = 2.5, room_max_z = 3.5;
  double wall_clearance = 0.5;                    // meters
  double sir_db = 0.0;                            // desired vs interferer at mic 1
  int forced_doa_gap_deg = -1;                    // exact gap when >= 0
  bool distinct_radii = false;                    // force |r_d - r_i| >= 0.3 m
  int max_retries = 1000;

  void Validate() const;
  nlohmann::json ToJson() const;
  static SceneConfig FromJson(const nlohmann::json& j);
};

struct RoomScene {
  Eigen::Vector3d room_dims;
  double rt60 = 0.5;
  ArrayGeometry array;
  Eigen::Vector3d desired_pos, interferer_pos, noise_pos;
  int desired_doa_deg = 0, interferer_doa_deg = 0;  // on the 2-degree grid
  double desired_radius = 0, interferer_radius = 0;
  double mix_snr_db = 10.0;
  double sir_db = 0.0;
  uint64_t seed = 0;

  // Throws on any violated invariant (grid DOAs, clearances, ranges).
  void Validate(const SceneConfig& cfg = SceneConfig()) const;

  nlohmann::json ToJson() const;
  static RoomScene FromJson(const nlohmann::json& j);

  bool operator==(const RoomScene& o) const;
};

// Deterministic rejection sampler over the config ranges. Throws after
// cfg.max_retries attempts with the violated constraint in the message.
RoomScene SampleRoomScene(uint64_t seed, const SceneConfig& cfg = SceneConfig());

}  // namespace tsx

#endif  // TSX_SIM_SCENE_H_

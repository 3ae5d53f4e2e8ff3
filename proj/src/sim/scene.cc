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

#include "sim/scene.h"

#include <cmath>

#include "util/error.h"
#include "util/rng.h"

namespace tsx {

namespace {

bool InsideWithClearance(const Eigen::Vector3d& p, const Eigen::Vector3d& dims,
                         double clearance) {
  for (int i = 0; i < 3; ++i)
    if (p[i] < clearance || p[i] > dims[i] - clearance) return false;
  return true;
}

nlohmann::json Vec3ToJson(const Eigen::Vector3d& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d Vec3FromJson(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void SceneConfig::Validate() const {
  TSX_CHECK(rt60_min > 0 && rt60_max >= rt60_min, "scene-config",
            "invalid rt60 range");
  TSX_CHECK(snr_max >= snr_min, "scene-config", "invalid snr range");
  TSX_CHECK(radius_min > 0 && radius_max >= radius_min, "scene-config",
            "invalid radius range");
  TSX_CHECK(room_max_x >= room_min_x && room_max_y >= room_min_y &&
                room_max_z >= room_min_z,
            "scene-config", "invalid room dimension ranges");
  TSX_CHECK(wall_clearance >= 0, "scene-config", "negative wall clearance");
  TSX_CHECK(forced_doa_gap_deg < 0 || (forced_doa_gap_deg % kDoaGridStepDeg == 0 &&
                                       forced_doa_gap_deg >= 2 &&
                                       forced_doa_gap_deg <= 180),
            "scene-config", "forced DOA gap must be a positive grid multiple");
  TSX_CHECK(max_retries > 0, "scene-config", "max_retries must be positive");
}

nlohmann::json SceneConfig::ToJson() const {
  return nlohmann::json{
      {"rt60_min", rt60_min},       {"rt60_max", rt60_max},
      {"snr_min", snr_min},         {"snr_max", snr_max},
      {"radius_min", radius_min},   {"radius_max", radius_max},
      {"room_min_x", room_min_x},   {"room_max_x", room_max_x},
      {"room_min_y", room_min_y},   {"room_max_y", room_max_y},
      {"room_min_z", room_min_z},   {"room_max_z", room_max_z},
      {"wall_clearance", wall_clearance},
      {"sir_db", sir_db},
      {"forced_doa_gap_deg", forced_doa_gap_deg},
      {"distinct_radii", distinct_radii},
      {"max_retries", max_retries}};
}

SceneConfig SceneConfig::FromJson(const nlohmann::json& j) {
  SceneConfig c;
  auto load = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  load("rt60_min", c.rt60_min);
  load("rt60_max", c.rt60_max);
  load("snr_min", c.snr_min);
  load("snr_max", c.snr_max);
  load("radius_min", c.radius_min);
  load("radius_max", c.radius_max);
  load("room_min_x", c.room_min_x);
  load("room_max_x", c.room_max_x);
  load("room_min_y", c.room_min_y);
  load("room_max_y", c.room_max_y);
  load("room_min_z", c.room_min_z);
  load("room_max_z", c.room_max_z);
  load("wall_clearance", c.wall_clearance);
  load("sir_db", c.sir_db);
  load("forced_doa_gap_deg", c.forced_doa_gap_deg);
  load("distinct_radii", c.distinct_radii);
  load("max_retries", c.max_retries);
  c.Validate();
  return c;
}

void RoomScene::Validate(const SceneConfig& cfg) const {
  TSX_CHECK(room_dims.minCoeff() > 0, "scene", "non-positive room dimension");
  TSX_CHECK(rt60 >= cfg.rt60_min && rt60 <= cfg.rt60_max, "scene",
            "rt60 " << rt60 << " outside [" << cfg.rt60_min << "," << cfg.rt60_max << "]");
  TSX_CHECK(mix_snr_db >= cfg.snr_min && mix_snr_db <= cfg.snr_max, "scene",
            "snr outside configured range");
  for (const auto& mic : array.MicPositions())
    TSX_CHECK(InsideWithClearance(mic, room_dims, cfg.wall_clearance), "scene",
              "microphone closer than " << cfg.wall_clearance << " m to a wall");
  auto check_source = [&](const Eigen::Vector3d& p, int doa, double radius,
                          const char* name) {
    TSX_CHECK(InsideWithClearance(p, room_dims, cfg.wall_clearance), "scene",
              name << " source violates wall clearance");
    TSX_CHECK(doa % kDoaGridStepDeg == 0 && doa >= 0 && doa <= 180, "scene",
              name << " DOA off the 2-degree grid");
    TSX_CHECK(DoaOf(p, array) == doa, "scene",
              name << " DOA does not match its position");
    TSX_CHECK(radius >= cfg.radius_min && radius <= cfg.radius_max, "scene",
              name << " radius outside range");
  };
  check_source(desired_pos, desired_doa_deg, desired_radius, "desired");
  check_source(interferer_pos, interferer_doa_deg, interferer_radius, "interferer");
  TSX_CHECK(InsideWithClearance(noise_pos, room_dims, cfg.wall_clearance),
            "scene", "noise source violates wall clearance");
}

nlohmann::json RoomScene::ToJson() const {
  return nlohmann::json{
      {"room_dims", Vec3ToJson(room_dims)},
      {"rt60", rt60},
      {"array_center", Vec3ToJson(array.center)},
      {"array_axis_azimuth_deg", array.axis_azimuth_deg},
      {"array_mic_count", array.mic_count},
      {"array_spacing", array.spacing},
      {"desired_pos", Vec3ToJson(desired_pos)},
      {"interferer_pos", Vec3ToJson(interferer_pos)},
      {"noise_pos", Vec3ToJson(noise_pos)},
      {"desired_doa_deg", desired_doa_deg},
      {"interferer_doa_deg", interferer_doa_deg},
      {"desired_radius", desired_radius},
      {"interferer_radius", interferer_radius},
      {"mix_snr_db", mix_snr_db},
      {"sir_db", sir_db},
      {"seed", seed}};
}

RoomScene RoomScene::FromJson(const nlohmann::json& j) {
  RoomScene s;
  s.room_dims = Vec3FromJson(j.at("room_dims"));
  s.rt60 = j.at("rt60").get<double>();
  s.array.center = Vec3FromJson(j.at("array_center"));
  s.array.axis_azimuth_deg = j.at("array_axis_azimuth_deg").get<double>();
  s.array.mic_count = j.at("array_mic_count").get<int>();
  s.array.spacing = j.at("array_spacing").get<double>();
  s.desired_pos = Vec3FromJson(j.at("desired_pos"));
  s.interferer_pos = Vec3FromJson(j.at("interferer_pos"));
  s.noise_pos = Vec3FromJson(j.at("noise_pos"));
  s.desired_doa_deg = j.at("desired_doa_deg").get<int>();
  s.interferer_doa_deg = j.at("interferer_doa_deg").get<int>();
  s.desired_radius = j.at("desired_radius").get<double>();
  s.interferer_radius = j.at("interferer_radius").get<double>();
  s.mix_snr_db = j.at("mix_snr_db").get<double>();
  s.sir_db = j.at("sir_db").get<double>();
  s.seed = j.at("seed").get<uint64_t>();
  return s;
}

bool RoomScene::operator==(const RoomScene& o) const {
  return room_dims == o.room_dims && rt60 == o.rt60 &&
         array.center == o.array.center &&
         array.axis_azimuth_deg == o.array.axis_azimuth_deg &&
         array.mic_count == o.array.mic_count && array.spacing == o.array.spacing &&
         desired_pos == o.desired_pos && interferer_pos == o.interferer_pos &&
         noise_pos == o.noise_pos && desired_doa_deg == o.desired_doa_deg &&
         interferer_doa_deg == o.interferer_doa_deg &&
         desired_radius == o.desired_radius &&
         interferer_radius == o.interferer_radius &&
         mix_snr_db == o.mix_snr_db && sir_db == o.sir_db && seed == o.seed;
}

RoomScene SampleRoomScene(uint64_t seed, const SceneConfig& cfg) {
  cfg.Validate();
  Rng rng(seed ^ 0x5ce9e5u);

  RoomScene s;
  s.seed = seed;
  s.sir_db = cfg.sir_db;

  std::string last_violation = "none";
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    s.room_dims = {rng.Uniform(cfg.room_min_x, cfg.room_max_x),
                   rng.Uniform(cfg.room_min_y, cfg.room_max_y),
                   rng.Uniform(cfg.room_min_z, cfg.room_max_z)};
    s.rt60 = rng.Uniform(cfg.rt60_min, cfg.rt60_max);
    s.mix_snr_db = rng.Uniform(cfg.snr_min, cfg.snr_max);

    s.array.mic_count = 4;
    s.array.spacing = 0.08;
    s.array.axis_azimuth_deg = rng.Uniform(0.0, 360.0);
    // Keep room for the outermost mics plus clearance.
    const double margin = cfg.wall_clearance + 1.5 * s.array.spacing;
    if (s.room_dims.x() <= 2 * margin || s.room_dims.y() <= 2 * margin ||
        s.room_dims.z() <= 2 * cfg.wall_clearance) {
      last_violation = "room too small for array clearance";
      continue;
    }
    s.array.center = {rng.Uniform(margin, s.room_dims.x() - margin),
                      rng.Uniform(margin, s.room_dims.y() - margin),
                      rng.Uniform(cfg.wall_clearance, s.room_dims.z() - cfg.wall_clearance)};
    bool mics_ok = true;
    for (const auto& mic : s.array.MicPositions())
      mics_ok = mics_ok && InsideWithClearance(mic, s.room_dims, cfg.wall_clearance);
    if (!mics_ok) {
      last_violation = "microphone wall clearance";
      continue;
    }

    if (cfg.forced_doa_gap_deg >= 0) {
      const int gap = cfg.forced_doa_gap_deg;
      s.desired_doa_deg =
          static_cast<int>(rng.UniformInt(0, (180 - gap) / kDoaGridStepDeg)) *
          kDoaGridStepDeg;
      s.interferer_doa_deg = s.desired_doa_deg + gap;
      if (rng.Uniform() < 0.5) std::swap(s.desired_doa_deg, s.interferer_doa_deg);
    } else {
      s.desired_doa_deg =
          static_cast<int>(rng.UniformInt(0, kDoaGridBins - 1)) * kDoaGridStepDeg;
      do {
        s.interferer_doa_deg =
            static_cast<int>(rng.UniformInt(0, kDoaGridBins - 1)) * kDoaGridStepDeg;
      } while (s.interferer_doa_deg == s.desired_doa_deg);
    }

    s.desired_radius = rng.Uniform(cfg.radius_min, cfg.radius_max);
    s.interferer_radius = rng.Uniform(cfg.radius_min, cfg.radius_max);
    if (cfg.distinct_radii) {
      int tries = 0;
      while (std::abs(s.desired_radius - s.interferer_radius) < 0.3 && tries++ < 64)
        s.interferer_radius = rng.Uniform(cfg.radius_min, cfg.radius_max);
      if (std::abs(s.desired_radius - s.interferer_radius) < 0.3) {
        last_violation = "distinct radii";
        continue;
      }
    }

    s.desired_pos = PositionFromDoa(s.array, s.desired_doa_deg, s.desired_radius);
    s.interferer_pos =
        PositionFromDoa(s.array, s.interferer_doa_deg, s.interferer_radius);
    if (!InsideWithClearance(s.desired_pos, s.room_dims, cfg.wall_clearance) ||
        !InsideWithClearance(s.interferer_pos, s.room_dims, cfg.wall_clearance)) {
      last_violation = "source wall clearance (radius vs room size)";
      continue;
    }

    s.noise_pos = {rng.Uniform(cfg.wall_clearance, s.room_dims.x() - cfg.wall_clearance),
                   rng.Uniform(cfg.wall_clearance, s.room_dims.y() - cfg.wall_clearance),
                   rng.Uniform(cfg.wall_clearance, s.room_dims.z() - cfg.wall_clearance)};
    if ((s.noise_pos - s.array.center).norm() < 0.3) {
      last_violation = "noise source too close to the array";
      continue;
    }

    s.Validate(cfg);
    return s;
  }
  TSX_CHECK(false, "scene",
            "rejection sampling failed after " << cfg.max_retries
                << " retries; last violated constraint: " << last_violation);
  return s;  // unreachable
}

}  // namespace tsx

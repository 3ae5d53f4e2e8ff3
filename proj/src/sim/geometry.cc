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

#include "sim/geometry.h"

#include <cmath>

#include "util/error.h"

namespace tsx {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

Eigen::Vector3d ArrayGeometry::AxisDir() const {
  const double a = axis_azimuth_deg * kDegToRad;
  return {std::cos(a), std::sin(a), 0.0};
}

Eigen::Vector3d ArrayGeometry::PerpDir() const {
  const double a = axis_azimuth_deg * kDegToRad;
  return {-std::sin(a), std::cos(a), 0.0};
}

std::vector<Eigen::Vector3d> ArrayGeometry::MicPositions() const {
  std::vector<Eigen::Vector3d> mics(mic_count);
  const Eigen::Vector3d u = AxisDir();
  const double half = (mic_count - 1) / 2.0;
  for (int j = 0; j < mic_count; ++j)
    mics[j] = center + (j - half) * spacing * u;
  return mics;
}

double GeometricAzimuthDeg(const Eigen::Vector3d& position,
                           const ArrayGeometry& array) {
  Eigen::Vector3d v = position - array.center;
  v.z() = 0.0;  // azimuth is measured in the horizontal plane
  const double norm = v.norm();
  TSX_CHECK(norm > 1e-9, "doa",
            "position coincides with the array center; angle undefined");
  const double c = array.AxisDir().dot(v) / norm;
  return std::acos(std::clamp(c, -1.0, 1.0)) / kDegToRad;
}

int DoaOf(const Eigen::Vector3d& position, const ArrayGeometry& array) {
  const double az = GeometricAzimuthDeg(position, array);
  int grid = static_cast<int>(std::lround(az / kDoaGridStepDeg)) * kDoaGridStepDeg;
  if (grid < 0) grid = 0;
  if (grid > 180) grid = 180;
  return grid;
}

Eigen::Vector3d PositionFromDoa(const ArrayGeometry& array, int doa_deg,
                                double radius) {
  const double a = doa_deg * kDegToRad;
  return array.center +
         radius * (std::cos(a) * array.AxisDir() + std::sin(a) * array.PerpDir());
}

}  // namespace tsx

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

#ifndef TSX_SIM_GEOMETRY_H_
#define TSX_SIM_GEOMETRY_H_

#include <vector>

#include <Eigen/Dense>

namespace tsx {

constexpr double kSpeedOfSound = 343.0;  // m/s
constexpr int kSampleRate = 8000;
constexpr int kDoaGridStepDeg = 2;
constexpr int kDoaGridBins = 91;  // 0..180 degrees inclusive

// Uniform linear array, collinear mics symmetric about the center, laid out
// in the horizontal plane along the axis azimuth.
struct ArrayGeometry {
  int mic_count = 4;
  double spacing = 0.08;  // meters
  Eigen::Vector3d center{0, 0, 0};
  double axis_azimuth_deg = 0.0;  // in [0, 360)

  Eigen::Vector3d AxisDir() const;
  Eigen::Vector3d PerpDir() const;  // horizontal normal to the axis
  std::vector<Eigen::Vector3d> MicPositions() const;
};

// Azimuth of a position relative to the array center and axis, quantized to
// the nearest point of the 2-degree grid over [0, 180]. Throws if the
// position projects onto the array center.
int DoaOf(const Eigen::Vector3d& position, const ArrayGeometry& array);

// Unquantized azimuth in degrees.
double GeometricAzimuthDeg(const Eigen::Vector3d& position,
                           const ArrayGeometry& array);

// Point at the given grid DOA and radius, in the array's horizontal plane.
Eigen::Vector3d PositionFromDoa(const ArrayGeometry& array, int doa_deg,
                                double radius);

inline int DoaToBin(int doa_deg) { return doa_deg / kDoaGridStepDeg; }
inline int BinToDoa(int bin) { return bin * kDoaGridStepDeg; }

}  // namespace tsx

#endif  // TSX_SIM_GEOMETRY_H_

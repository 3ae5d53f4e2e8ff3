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

#ifndef TSX_UTIL_RNG_H_
#define TSX_UTIL_RNG_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace tsx {

// xoshiro256** with splitmix64 seeding. Self-contained so that streams are
// byte-identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { Seed(seed); }

  void Seed(uint64_t seed) {
    uint64_t x = seed;
    for (auto& si : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      si = z ^ (z >> 31);
    }
    have_gauss_ = false;
  }

  uint64_t Next() {
    const uint64_t result = Rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = Rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(Next() % span);
  }

  // Standard normal via Box-Muller (cached pair).
  double Normal() {
    if (have_gauss_) {
      have_gauss_ = false;
      return gauss_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = Uniform();
    double u2 = Uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

  // Derive an independent child stream, e.g. per record or per worker.
  Rng Fork(uint64_t stream) const {
    Rng child;
    child.Seed(s_[0] ^ (0x6c62272e07bb0142ULL * (stream + 1)) ^ s_[3]);
    return child;
  }

  std::vector<uint64_t> SaveState() const {
    std::vector<uint64_t> st(s_.begin(), s_.end());
    st.push_back(have_gauss_ ? 1 : 0);
    st.push_back(have_gauss_ ? *reinterpret_cast<const uint64_t*>(&gauss_) : 0);
    return st;
  }

  void LoadState(const std::vector<uint64_t>& st) {
    for (int i = 0; i < 4; ++i) s_[i] = st[i];
    have_gauss_ = st.size() > 4 && st[4] != 0;
    if (have_gauss_) gauss_ = *reinterpret_cast<const double*>(&st[5]);
  }

 private:
  static uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> s_{};
  bool have_gauss_ = false;
  double gauss_ = 0.0;
};

}  // namespace tsx

#endif  // TSX_UTIL_RNG_H_

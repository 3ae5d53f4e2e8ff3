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

#ifndef TSX_UTIL_ERROR_H_
#define TSX_UTIL_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace tsx {

class Error : public std::runtime_error {
 public:
  Error(const std::string& stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

#define TSX_CHECK(cond, stage, msg)                \
  do {                                             \
    if (!(cond)) {                                 \
      std::ostringstream oss__;                    \
      oss__ << msg;                                \
      throw ::tsx::Error((stage), oss__.str());    \
    }                                              \
  } while (0)

}  // namespace tsx

#endif  // TSX_UTIL_ERROR_H_

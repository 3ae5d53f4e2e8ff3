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

#include "nn/checkpoint.h"

#include <cstdint>
#include <fstream>
#include <cstdio>
#include <sstream>

namespace tsx {
namespace nn {

namespace {

constexpr char kMagic[] = "TSXCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

void WriteTensor(std::ofstream& out, const Tensor& t) {
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

void ReadTensor(std::ifstream& in, Tensor& t) {
  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

nlohmann::json TensorEntry(const std::string& name, const std::string& kind,
                           const Tensor& t) {
  return {{"name", name}, {"kind", kind}, {"shape", t.shape}};
}

}  // namespace

void SaveCheckpoint(const std::string& path, const ParamStore& store,
                    const AdamW* opt, const nlohmann::json& meta) {
  nlohmann::json header;
  header["meta"] = meta;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, e] : store.params())
    tensors.push_back(TensorEntry(name, "param", e.value));
  for (const auto& [name, b] : store.buffers())
    tensors.push_back(TensorEntry(name, "buffer", b));
  if (opt) {
    header["adam_step"] = opt->step_count();
    auto& o = const_cast<AdamW*>(opt)->m_state();
    auto& v = const_cast<AdamW*>(opt)->v_state();
    for (const auto& [name, t] : o)
      tensors.push_back(TensorEntry(name, "adam_m", t));
    for (const auto& [name, t] : v)
      tensors.push_back(TensorEntry(name, "adam_v", t));
  }
  header["tensors"] = tensors;

  const std::string hs = header.dump();
  std::ofstream out(path, std::ios::binary);
  TSX_CHECK(out.good(), "checkpoint", "cannot open " << path << " for writing");
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  const uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, e] : store.params()) WriteTensor(out, e.value);
  for (const auto& [name, b] : store.buffers()) WriteTensor(out, b);
  if (opt) {
    for (const auto& [name, t] : const_cast<AdamW*>(opt)->m_state())
      WriteTensor(out, t);
    for (const auto& [name, t] : const_cast<AdamW*>(opt)->v_state())
      WriteTensor(out, t);
  }
  TSX_CHECK(out.good(), "checkpoint", "short write to " << path);
}

nlohmann::json LoadCheckpoint(const std::string& path, ParamStore* store,
                              AdamW* opt) {
  std::ifstream in(path, std::ios::binary);
  TSX_CHECK(in.good(), "checkpoint", "cannot open " << path);
  char magic[16] = {};
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  TSX_CHECK(std::string(magic, kMagicLen) == kMagic, "checkpoint",
            path << " is not a checkpoint file");
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  TSX_CHECK(in.good(), "checkpoint", "truncated header in " << path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint", std::string("corrupt header: ") + e.what());
  }

  for (const auto& entry : header.at("tensors")) {
    const std::string name = entry.at("name");
    const std::string kind = entry.at("kind");
    const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    Tensor* dst = nullptr;
    if (kind == "param") {
      if (!store->Has(name)) store->Create(name, shape);
      dst = &store->Value(name);
      TSX_CHECK(dst->shape == shape, "checkpoint",
                "shape mismatch for " << name << ": file has "
                    << Tensor(shape).ShapeStr() << ", model has "
                    << dst->ShapeStr());
    } else if (kind == "buffer") {
      dst = &store->Buffer(name, shape);
      TSX_CHECK(dst->shape == shape, "checkpoint", "buffer shape mismatch for " << name);
    } else if (kind == "adam_m" || kind == "adam_v") {
      if (opt) {
        auto& s = kind == "adam_m" ? opt->m_state() : opt->v_state();
        dst = &s.emplace(name, Tensor::Zeros(shape)).first->second;
        dst->shape = shape;
        dst->data.assign(Tensor::NumelOf(shape), 0.0);
      }
    } else {
      throw Error("checkpoint", "unknown tensor kind " + kind);
    }
    if (dst) {
      ReadTensor(in, *dst);
    } else {
      in.seekg(static_cast<std::streamoff>(Tensor::NumelOf(shape) *
                                           sizeof(double)),
               std::ios::cur);
    }
  }
  TSX_CHECK(in.good(), "checkpoint", "truncated payload in " << path);
  if (opt && header.contains("adam_step"))
    opt->set_step_count(header["adam_step"].get<int64_t>());
  return header.value("meta", nlohmann::json::object());
}

nlohmann::json ReadCheckpointMeta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TSX_CHECK(in.good(), "checkpoint", "cannot open " << path);
  char magic[16] = {};
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  TSX_CHECK(std::string(magic, kMagicLen) == kMagic, "checkpoint",
            path << " is not a checkpoint file");
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  TSX_CHECK(in.good(), "checkpoint", "truncated header in " << path);
  return nlohmann::json::parse(hs).value("meta", nlohmann::json::object());
}

std::string FileFingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TSX_CHECK(in.good(), "fingerprint", "cannot open " << path);
  uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace nn
}  // namespace tsx

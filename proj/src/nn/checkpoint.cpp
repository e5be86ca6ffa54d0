// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nanogrid/nn/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid::nn {
namespace {

constexpr char kMagic[4] = {'N', 'G', 'C', 'K'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ConfigError("checkpoint " + path + ": truncated file");
  }
  return v;
}

void commit(const std::string& tmp, const std::string& path) {
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("checkpoint: cannot rename " + tmp + " to " + path);
  }
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<const Parameter*>& params) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const Parameter* p : params) {
      const std::vector<int> shape = p->value.shape();
      put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
      for (int d : shape) put<std::int32_t>(out, d);
      out.write(reinterpret_cast<const char*>(p->value.data()),
                static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp);
  }
  commit(tmp, path);

  nlohmann::json manifest;
  manifest["format"] = "NGCK";
  manifest["version"] = kCheckpointVersion;
  manifest["arrays"] = nlohmann::json::array();
  for (const Parameter* p : params) {
    manifest["arrays"].push_back({{"name", p->name}, {"shape", p->value.shape()}});
  }
  const std::string mtmp = path + ".json.tmp";
  {
    std::ofstream out(mtmp, std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + mtmp);
    out << manifest.dump(2) << '\n';
  }
  commit(mtmp, path + ".json");
}

std::vector<std::pair<std::string, Tensor>> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint " + path + ": cannot open");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("checkpoint " + path + ": bad magic");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint " + path + ": unsupported version " +
                      std::to_string(version));
  }
  const auto count = get<std::uint32_t>(in, path);

  std::ifstream mf(path + ".json");
  if (!mf) throw ConfigError("checkpoint " + path + ": missing manifest");
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint " + path + ".json: " + e.what());
  }
  const auto& arrays = manifest.at("arrays");
  if (arrays.size() != count) {
    throw ConfigError("checkpoint " + path + ": manifest lists " +
                      std::to_string(arrays.size()) + " arrays, file holds " +
                      std::to_string(count));
  }

  std::vector<std::pair<std::string, Tensor>> out;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto rank = get<std::uint32_t>(in, path);
    if (rank == 0 || rank > 3) {
      throw ConfigError("checkpoint " + path + ": bad rank " + std::to_string(rank));
    }
    std::vector<int> shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(get<std::int32_t>(in, path));
    if (arrays[k].at("shape").get<std::vector<int>>() != shape) {
      throw ConfigError("checkpoint " + path + ": manifest shape mismatch at array " +
                        std::to_string(k));
    }
    Tensor t(shape);
    if (!in.read(reinterpret_cast<char*>(t.data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)))) {
      throw ConfigError("checkpoint " + path + ": truncated file");
    }
    out.emplace_back(arrays[k].at("name").get<std::string>(), std::move(t));
  }
  return out;
}

void load_checkpoint(const std::string& path, const std::vector<Parameter*>& params) {
  auto arrays = read_checkpoint(path);
  if (arrays.size() != params.size()) {
    throw ContractError("load_checkpoint: file has " + std::to_string(arrays.size()) +
                        " arrays, model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (arrays[i].first != params[i]->name ||
        !arrays[i].second.same_shape(params[i]->value)) {
      throw ContractError("load_checkpoint: array " + std::to_string(i) + " is " +
                          arrays[i].first + " " + arrays[i].second.shape_string() +
                          ", model expects " + params[i]->name + " " +
                          params[i]->value.shape_string());
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i]->value = std::move(arrays[i].second);
    params[i]->zero_grad();
  }
}

}  // namespace nanogrid::nn

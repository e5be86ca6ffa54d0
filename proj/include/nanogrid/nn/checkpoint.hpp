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

#ifndef NANOGRID_NN_CHECKPOINT_HPP_
#define NANOGRID_NN_CHECKPOINT_HPP_

#include <string>
#include <utility>
#include <vector>

#include "nanogrid/nn/tape.hpp"

namespace nanogrid::nn {

// Binary layout, native byte order:
//   "NGCK" | u32 version | u32 count | count x (u32 rank, rank x i32 dim,
//   prod(dim) x f64)
// A JSON manifest next to it (<path>.json) lists names and shapes in the same
// order. Both files are written to a temporary name and renamed into place.
inline constexpr unsigned kCheckpointVersion = 1;

void save_checkpoint(const std::string& path,
                     const std::vector<const Parameter*>& params);

// Reads arrays and manifest names back in file order.
std::vector<std::pair<std::string, Tensor>> read_checkpoint(const std::string& path);

// Loads into existing parameters; names and shapes must match the manifest
// exactly (ContractError otherwise). Missing or corrupt files are ConfigError.
void load_checkpoint(const std::string& path, const std::vector<Parameter*>& params);

}  // namespace nanogrid::nn

#endif  // NANOGRID_NN_CHECKPOINT_HPP_

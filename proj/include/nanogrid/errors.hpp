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

#ifndef NANOGRID_ERRORS_HPP_
#define NANOGRID_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nanogrid {

// Invalid or inconsistent configuration (bad schedule, empty series, missing
// file). Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke an interface contract: shape mismatch, wrong action count,
// stepping a finished episode, reusing a tape.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Battery state-of-charge bound would be violated.
class SocBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trading round could not complete. Carries the stage and cluster at fault.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string stage, int cluster, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)), cluster_(cluster) {}

  const std::string& stage() const { return stage_; }
  int cluster() const { return cluster_; }

 private:
  std::string stage_;
  int cluster_;
};

}  // namespace nanogrid

#endif  // NANOGRID_ERRORS_HPP_

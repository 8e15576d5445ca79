// Copyright 2026 The MIRNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirnet/numerics/autodiff.hpp"
#include "mirnet/numerics/tensor.hpp"

namespace mirnet::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout, all integers unsigned 32-bit little-endian:
///   "MIRN" | version | len + config text | count |
///   count x (len + name | rank | rank x dim | values as float64 LE)
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string config_text;
  std::vector<std::string> names;
  std::vector<numerics::Tensor> values;
};

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { bad_magic, version_mismatch, truncated, malformed, io };
  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Snapshot of every parameter in registration order.
Checkpoint make_checkpoint(const numerics::ParameterStore& store, const std::string& config_text);

/// Copies checkpoint arrays into a store. Names must match one to one and
/// shapes must agree, otherwise the error names the first offending parameter.
void apply_checkpoint(const Checkpoint& ckpt, numerics::ParameterStore& store);

}  // namespace mirnet::harness

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

#include <string>
#include <vector>

#include "mirnet/model/network.hpp"
#include "mirnet/train/trainer.hpp"

namespace mirnet::harness {

/// Everything a run needs: the model shape and the optimisation settings.
/// num_classes = 0 means "one class per training speaker of the corpus".
struct RunConfig {
  model::ModelConfig model = [] {
    model::ModelConfig m;
    m.num_classes = 0;
    return m;
  }();
  train::TrainConfig train;
};

/// Every key accepted in a config file, in serialisation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Unknown keys and malformed values throw
/// std::invalid_argument; the unknown-key message lists every valid key.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment, blank lines are ignored.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// All keys, one per line, doubles with 17 significant digits, so that
/// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// Applies a `key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace mirnet::harness

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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mirnet/eval/protocol.hpp"
#include "mirnet/frontend/wav.hpp"
#include "mirnet/harness/checkpoint.hpp"
#include "mirnet/harness/config.hpp"
#include "mirnet/harness/corpus.hpp"
#include "mirnet/model/network.hpp"
#include "mirnet/numerics/tensor.hpp"

namespace mirnet::harness {

struct LoadedModel {
  RunConfig config;
  std::unique_ptr<model::SpeakerNet> net;
};

/// Rebuilds the network described by the checkpoint's config (or by
/// `override_config` when given) and loads its parameters.
LoadedModel load_model(const std::filesystem::path& ckpt_path, const std::optional<RunConfig>& override_config = {});

/// Identity vectors and attention weights of one feature matrix.
struct Extraction {
  eval::IdentityPair identities;
  std::array<std::vector<double>, 2> attention;
};
Extraction extract(const model::SpeakerNet& net, const numerics::Tensor& features);

/// Loads every waveform once. References stay valid for the cache's lifetime.
class WaveCache {
 public:
  explicit WaveCache(const CorpusIndex& index) : index_(index) {}
  const frontend::Waveform& get(const std::string& key);

 private:
  const CorpusIndex& index_;
  std::map<std::string, frontend::Waveform> cache_;
};

/// Training and validation utterances with class labels from the sorted training speakers.
train::TrainData load_training_data(const CorpusIndex& index, WaveCache& cache);

/// Renders the three mixtures of every trial, extracts identities and fills d_p and d_n.
void score_trials(const model::SpeakerNet& net, WaveCache& cache, std::vector<eval::Trial>& trials);

struct EerRun {
  std::vector<eval::Trial> seen;
  std::vector<eval::Trial> unseen;
  eval::EERResult seen_eer;
  std::optional<eval::EERResult> unseen_eer;  // absent when the corpus has no unseen split
};

/// Builds `count` trials from eval_seen (training speakers only) and from
/// eval_unseen, scores them and computes both EERs.
EerRun evaluate_eer(const model::SpeakerNet& net, const CorpusIndex& index, std::size_t count, std::uint64_t seed);

/// `seen_eer=<pct> unseen_eer=<pct> trials=<N>`
std::string format_eer_line(const EerRun& run);

}  // namespace mirnet::harness

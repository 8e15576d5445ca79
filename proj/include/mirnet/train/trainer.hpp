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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mirnet/frontend/audio.hpp"
#include "mirnet/model/network.hpp"
#include "mirnet/numerics/tensor.hpp"

namespace mirnet::train {

enum class Optimizer { adam, sgd };

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::adam;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t patience = 10;
  /// Cross-speaker mixtures drawn per epoch; 0 means one per training utterance.
  std::size_t pairs_per_epoch = 0;
  /// Fixed validation mixtures; 0 means one per validation utterance.
  std::size_t val_mixtures = 0;

  void validate() const;
};

/// An utterance with its training class index.
struct LabeledWave {
  frontend::Waveform wave;
  std::size_t label = 0;
};

/// Indices of two utterances from different speakers plus the seed that
/// places their segments.
struct MixturePlan {
  std::size_t a = 0;
  std::size_t b = 0;
  std::uint64_t seed = 0;
};

/// Draws `count` cross-speaker pairs. Each first member cycles through a
/// shuffled order of all utterances; its partner is uniform over utterances of
/// every other speaker.
std::vector<MixturePlan> epoch_pairs(const std::vector<LabeledWave>& utterances, std::size_t count,
                                     Rng& rng);

/// Cuts a segment from each source (zero-padding short ones), mixes them and
/// computes normalised log-magnitude features.
struct RenderedMixture {
  frontend::MixtureSample sample;
  numerics::Tensor features;
};
RenderedMixture render_mixture(const frontend::Waveform& a, const frontend::Waveform& b, std::uint64_t seed,
                               const model::ModelConfig& config);

/// Features plus labels of a prepared training or validation example.
struct Example {
  numerics::Tensor features;
  std::size_t label_a = 0;
  std::size_t label_b = 0;
};

std::vector<Example> prepare(const std::vector<LabeledWave>& utterances, const std::vector<MixturePlan>& plans,
                             const model::ModelConfig& config);

struct Validation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// True when the PIT-chosen mapping pairs every slot with a label and each
/// slot's argmax names that label.
bool assignment_correct(const std::vector<numerics::Tensor>& logits, const std::vector<std::size_t>& labels);

/// Mean PIT loss and the fraction of examples whose chosen assignment maps
/// every slot to its speaker with both argmax predictions correct.
Validation validate(const model::SpeakerNet& net, const std::vector<Example>& examples);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double wall_seconds = 0.0;
  std::string checkpoint_id;
};

/// `epoch<TAB>train_loss<TAB>val_loss<TAB>val_acc`
std::string format_epoch(const EpochRecord& r);

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain first-order optimiser state over a ParameterStore.
class OptimizerState {
 public:
  OptimizerState(const TrainConfig& cfg, const numerics::ParameterStore& store);
  void step(numerics::ParameterStore& store);

 private:
  TrainConfig cfg_;
  std::vector<numerics::Tensor> m_;
  std::vector<numerics::Tensor> v_;
  std::size_t t_ = 0;
};

/// Mean PIT loss over a batch, accumulated into parameter gradients (zeroed first).
double batch_gradient(model::SpeakerNet& net, const std::vector<Example>& batch);

struct TrainData {
  std::vector<LabeledWave> train;
  std::vector<LabeledWave> val;
};

/// Minimises the mean PIT loss. The parameters with the lowest validation loss
/// are restored at the end. `on_epoch` sees every record as it completes.
TrainReport train(model::SpeakerNet& net, const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace mirnet::train

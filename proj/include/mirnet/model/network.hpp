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

#include <array>
#include <cstddef>
#include <cstdint>

#include "mirnet/frontend/audio.hpp"
#include "mirnet/model/attention.hpp"
#include "mirnet/model/embedder.hpp"
#include "mirnet/model/encoder.hpp"
#include "mirnet/numerics/autodiff.hpp"

namespace mirnet::model {

struct ModelConfig {
  frontend::StftConfig stft;
  double segment_seconds = 3.0;
  std::size_t encoder_scale = 1;
  std::size_t attention_hidden = 64;
  BackboneConfig backbone;
  std::size_t num_classes = 8;
  bool length_norm = false;

  std::size_t bins() const { return stft.bins(); }
  std::size_t segment_samples() const;
  std::size_t segment_frames() const;
  EncoderConfig encoder() const { return EncoderConfig::table(bins(), encoder_scale); }
  void validate() const;
};

/// Everything a forward pass produces, slot k = 0, 1.
struct ForwardResult {
  numerics::Var latent;
  numerics::Var flipped;
  std::array<numerics::Var, 2> weights;
  std::array<numerics::Var, 2> attended;
  std::array<numerics::Var, 2> identities;
  std::array<numerics::Var, 2> logits;
};

/// Encoder, shared two-branch attention, shared backbone and shared classifier.
class SpeakerNet {
 public:
  explicit SpeakerNet(ModelConfig config);

  SpeakerNet(const SpeakerNet&) = delete;
  SpeakerNet& operator=(const SpeakerNet&) = delete;

  void init(std::uint64_t seed);

  /// spectrogram [bins x T] -> both identities and both logit vectors.
  ForwardResult forward(numerics::Graph& g, numerics::Var spectrogram) const;
  /// Runs everything after the encoder on a given [2D x T] latent.
  ForwardResult forward_from_latent(numerics::Graph& g, numerics::Var latent) const;

  const ModelConfig& config() const { return config_; }
  numerics::ParameterStore& parameters() { return store_; }
  const numerics::ParameterStore& parameters() const { return store_; }
  const Encoder& encoder() const { return encoder_; }
  const SpectralAttention& attention() const { return attention_; }
  const Embedder& embedder() const { return embedder_; }
  const Classifier& classifier() const { return classifier_; }

 private:
  ModelConfig config_;
  numerics::ParameterStore store_;
  Encoder encoder_;
  SpectralAttention attention_;
  Embedder embedder_;
  Classifier classifier_;
};

/// Log-magnitude features of a waveform, normalised per utterance, as used by the network.
numerics::Tensor features(const frontend::Waveform& wave, const ModelConfig& config);

}  // namespace mirnet::model

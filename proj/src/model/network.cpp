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

#include "mirnet/model/network.hpp"

#include <cmath>
#include <utility>
#include <stdexcept>

#include "mirnet/numerics/ops.hpp"

namespace mirnet::model {

using numerics::Graph;
using numerics::Var;

std::size_t ModelConfig::segment_samples() const {
  return static_cast<std::size_t>(std::llround(segment_seconds * stft.sample_rate));
}

std::size_t ModelConfig::segment_frames() const { return frontend::frame_count(segment_samples(), stft); }

void ModelConfig::validate() const {
  if (!(segment_seconds > 0.0)) throw std::invalid_argument("segment_seconds must be positive");
  if (num_classes == 0) throw std::invalid_argument("num_classes must be positive");
  if (attention_hidden == 0) throw std::invalid_argument("attention_hidden must be positive");
  if (segment_frames() == 0) {
    throw std::invalid_argument("segment of " + std::to_string(segment_seconds) +
                                " s is shorter than one analysis frame");
  }
  encoder().validate();
  backbone.validate();
  if (segment_frames() < backbone.min_frames()) {
    throw std::invalid_argument("segment yields " + std::to_string(segment_frames()) +
                                " frames but the backbone needs " + std::to_string(backbone.min_frames()));
  }
}

namespace {

const ModelConfig& checked(const ModelConfig& c) {
  c.validate();
  return c;
}

}  // namespace

SpeakerNet::SpeakerNet(ModelConfig config)
    : config_(checked(config)),
      encoder_(config_.encoder(), store_),
      attention_(AttentionConfig{config_.bins(), config_.attention_hidden, 0.2}, store_),
      embedder_(config_.backbone, config_.bins(), store_),
      classifier_(config_.backbone.embed_dim, config_.num_classes, store_) {}

void SpeakerNet::init(std::uint64_t seed) {
  Rng rng(seed);
  encoder_.init(rng);
  attention_.init(rng);
  embedder_.init(rng);
  classifier_.init(rng);
}

ForwardResult SpeakerNet::forward(Graph& g, Var spectrogram) const {
  return forward_from_latent(g, encoder_.encode(g, spectrogram));
}

ForwardResult SpeakerNet::forward_from_latent(Graph& g, Var latent) const {
  ForwardResult r;
  r.latent = latent;
  const auto branches = attention_.forward(g, latent);
  r.flipped = branches.flipped;
  for (std::size_t k = 0; k < 2; ++k) {
    r.weights[k] = branches.weights[k];
    r.attended[k] = branches.attended[k];
    Var id = embedder_.embed(g, r.attended[k]);
    if (config_.length_norm) id = numerics::l2_normalize(id);
    r.identities[k] = id;
    r.logits[k] = classifier_.classify(g, id);
  }
  return r;
}

numerics::Tensor features(const frontend::Waveform& wave, const ModelConfig& config) {
  auto spec = frontend::stft_log_magnitude(wave, config.stft);
  frontend::normalize_utterance(spec);
  return std::move(spec.values);
}

}  // namespace mirnet::model

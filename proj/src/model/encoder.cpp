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

#include "mirnet/model/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mirnet/model/init.hpp"
#include "mirnet/numerics/ops.hpp"

namespace mirnet::model {

using numerics::Graph;
using numerics::Var;

EncoderConfig EncoderConfig::table(std::size_t bins, std::size_t scale) {
  if (scale == 0) throw std::invalid_argument("encoder scale must be a positive divisor");
  EncoderConfig c;
  c.input_bins = bins;
  for (std::size_t i = 0; i + 1 < c.channels.size(); ++i) {
    c.channels[i] = std::max<std::size_t>(1, c.channels[i] / scale);
  }
  c.channels.back() = 2 * bins;
  return c;
}

void EncoderConfig::validate() const {
  if (channels.empty()) throw std::invalid_argument("encoder needs at least one layer");
  if (channels.size() != kernels.size()) {
    throw std::invalid_argument("encoder has " + std::to_string(channels.size()) +
                                " channel counts but " + std::to_string(kernels.size()) + " kernels");
  }
  for (std::size_t k : kernels) {
    if (k % 2 == 0) throw std::invalid_argument("encoder kernel " + std::to_string(k) + " is not odd");
  }
  for (std::size_t c : channels) {
    if (c == 0) throw std::invalid_argument("encoder channel count must be positive");
  }
  if (channels.back() % 2 != 0) {
    throw std::invalid_argument("encoder output channels " + std::to_string(channels.back()) +
                                " must be even");
  }
  if (channels.back() != 2 * input_bins) {
    throw std::invalid_argument("encoder output channels " + std::to_string(channels.back()) +
                                " must equal 2 x input bins (" + std::to_string(2 * input_bins) + ")");
  }
}

Encoder::Encoder(EncoderConfig config, numerics::ParameterStore& store, const std::string& prefix)
    : config_(std::move(config)) {
  config_.validate();
  std::size_t c_in = config_.input_bins;
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    const std::string layer = prefix + ".conv" + std::to_string(i + 1);
    const std::size_t c_out = config_.channels[i];
    weights_.push_back(&store.add(layer + ".weight", {c_out, c_in, config_.kernels[i]}));
    biases_.push_back(&store.add(layer + ".bias", {c_out}));
    c_in = c_out;
  }
}

void Encoder::init(Rng& rng) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    auto& w = weights_[i]->value;
    init_leaky(w, w.dim(1) * w.dim(2), config_.slope, rng);
    biases_[i]->value.fill(0.0);
  }
}

Var Encoder::encode(Graph& g, Var spectrogram) const {
  const auto& shape = spectrogram.shape();
  if (shape.size() != 2 || shape[0] != config_.input_bins) {
    throw std::invalid_argument("encode: expected [" + std::to_string(config_.input_bins) +
                                " x T] spectrogram, got " + numerics::shape_str(shape));
  }
  Var h = spectrogram;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    h = numerics::conv1d(h, g.parameter(*weights_[i]), g.parameter(*biases_[i]));
    h = numerics::leaky_relu(h, config_.slope);
  }
  return h;
}

std::size_t Encoder::layer_parameter_count(std::size_t i) const {
  return weights_.at(i)->value.size() + biases_.at(i)->value.size();
}

}  // namespace mirnet::model

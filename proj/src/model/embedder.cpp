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

#include "mirnet/model/embedder.hpp"

#include <stdexcept>

#include "mirnet/model/init.hpp"
#include "mirnet/numerics/ops.hpp"

namespace mirnet::model {

using numerics::Graph;
using numerics::Tensor;
using numerics::Var;

BackboneConfig BackboneConfig::resnet18(std::size_t embed_dim) {
  BackboneConfig c;
  c.widths = {64, 128, 256, 512};
  c.blocks = 2;
  c.embed_dim = embed_dim;
  return c;
}

void BackboneConfig::validate() const {
  if (widths.empty()) throw std::invalid_argument("backbone needs at least one stage");
  for (std::size_t w : widths) {
    if (w == 0) throw std::invalid_argument("backbone stage widths must be positive");
  }
  if (blocks == 0) throw std::invalid_argument("backbone needs at least one block per stage");
  if (embed_dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::size_t BackboneConfig::min_frames() const { return std::size_t{1} << (widths.size() - 1); }

Embedder::Conv Embedder::add_conv(numerics::ParameterStore& store, const std::string& name,
                                  std::size_t c_out, std::size_t c_in, std::size_t k) {
  Conv c;
  c.weight = &store.add(name + ".weight", {c_out, c_in, k, k});
  c.bias = &store.add(name + ".bias", {c_out});
  return c;
}

Embedder::Embedder(BackboneConfig config, std::size_t input_bins, numerics::ParameterStore& store,
                   const std::string& prefix)
    : config_(std::move(config)), input_bins_(input_bins) {
  config_.validate();
  stem_ = add_conv(store, prefix + ".stem", config_.widths[0], 1, 3);
  std::size_t c_in = config_.widths[0];
  for (std::size_t s = 0; s < config_.widths.size(); ++s) {
    const std::size_t width = config_.widths[s];
    for (std::size_t b = 0; b < config_.blocks; ++b) {
      const std::string name = prefix + ".stage" + std::to_string(s + 1) + ".block" + std::to_string(b + 1);
      Block blk;
      blk.stride = (s > 0 && b == 0) ? 2 : 1;
      blk.conv1 = add_conv(store, name + ".conv1", width, c_in, 3);
      blk.conv2 = add_conv(store, name + ".conv2", width, width, 3);
      if (blk.stride != 1 || c_in != width) {
        blk.shortcut = add_conv(store, name + ".shortcut", width, c_in, 1);
      }
      blocks_.push_back(blk);
      c_in = width;
    }
  }
  embed_w_ = &store.add(prefix + ".embed.weight", {c_in, config_.embed_dim});
  embed_b_ = &store.add(prefix + ".embed.bias", {config_.embed_dim});
}

void Embedder::init(Rng& rng) {
  const double slope = config_.slope;
  auto init_conv = [&rng, slope](const Conv& c, bool rectified) {
    if (!c.weight) return;
    Tensor& w = c.weight->value;
    const std::size_t fan_in = w.dim(1) * w.dim(2) * w.dim(3);
    if (rectified) {
      init_leaky(w, fan_in, slope, rng);
    } else {
      init_linear(w, fan_in, rng);
    }
    c.bias->value.fill(0.0);
  };
  init_conv(stem_, true);
  for (const Block& b : blocks_) {
    init_conv(b.conv1, true);
    init_conv(b.conv2, true);
    init_conv(b.shortcut, false);
  }
  init_linear(embed_w_->value, embed_w_->value.dim(0), rng);
  embed_b_->value.fill(0.0);
}

Var Embedder::conv3x3(Graph& g, Var x, const Conv& c, std::size_t stride) const {
  Var padded = numerics::pad_freq_zero_time_edge(x, 1);
  return numerics::conv2d(padded, g.parameter(*c.weight), g.parameter(*c.bias), stride);
}

Var Embedder::embed(Graph& g, Var attended) const {
  const auto& shape = attended.shape();
  if (shape.size() != 2 || shape[0] != input_bins_) {
    throw std::invalid_argument("embed: expected [" + std::to_string(input_bins_) +
                                " x T] input, got " + numerics::shape_str(shape));
  }
  if (shape[1] < config_.min_frames()) {
    throw std::invalid_argument("embed: " + std::to_string(shape[1]) + " frames, backbone with " +
                                std::to_string(config_.widths.size()) + " stages needs at least " +
                                std::to_string(config_.min_frames()));
  }
  Var h = numerics::reshape(attended, {1, shape[0], shape[1]});
  h = numerics::leaky_relu(conv3x3(g, h, stem_, 1), config_.slope);
  for (const Block& b : blocks_) {
    Var y = numerics::leaky_relu(conv3x3(g, h, b.conv1, b.stride), config_.slope);
    y = conv3x3(g, y, b.conv2, 1);
    Var skip = h;
    if (b.shortcut.weight) {
      skip = numerics::conv2d(h, g.parameter(*b.shortcut.weight), g.parameter(*b.shortcut.bias), b.stride);
    }
    h = numerics::leaky_relu(numerics::add(y, skip), config_.slope);
  }
  Var pooled = numerics::mean_over_time(numerics::mean_over_freq(h));
  return numerics::affine(pooled, g.parameter(*embed_w_), g.parameter(*embed_b_));
}

Classifier::Classifier(std::size_t embed_dim, std::size_t classes, numerics::ParameterStore& store,
                       const std::string& prefix)
    : classes_(classes) {
  if (classes == 0) throw std::invalid_argument("classifier needs at least one class");
  weight_ = &store.add(prefix + ".weight", {embed_dim, classes});
  bias_ = &store.add(prefix + ".bias", {classes});
}

void Classifier::init(Rng& rng) {
  init_linear(weight_->value, weight_->value.dim(0), rng);
  bias_->value.fill(0.0);
}

Var Classifier::classify(Graph& g, Var embedding) const {
  return numerics::affine(embedding, g.parameter(*weight_), g.parameter(*bias_));
}

}  // namespace mirnet::model

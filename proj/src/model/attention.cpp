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

#include "mirnet/model/attention.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mirnet/model/init.hpp"
#include "mirnet/numerics/ops.hpp"

namespace mirnet::model {

using numerics::Graph;
using numerics::Tensor;
using numerics::Var;

namespace {

void check_latent(const numerics::Shape& shape, std::size_t half, const char* op) {
  if (shape.size() != 2) {
    throw std::invalid_argument(std::string(op) + ": latent must be [2D x T], got " +
                                numerics::shape_str(shape));
  }
  if (shape[0] % 2 != 0) {
    throw std::invalid_argument(std::string(op) + ": odd channel count " + std::to_string(shape[0]));
  }
  if (shape[0] != 2 * half) {
    throw std::invalid_argument(std::string(op) + ": latent has " + std::to_string(shape[0]) +
                                " channels, expected 2 x " + std::to_string(half));
  }
}

}  // namespace

Tensor channel_flip(const Tensor& latent, std::size_t half) {
  check_latent(latent.shape(), half, "channel_flip");
  const std::size_t frames = latent.dim(1);
  Tensor out(latent.shape());
  for (std::size_t c = 0; c < 2 * half; ++c) {
    const std::size_t src = c < half ? c + half : c - half;
    for (std::size_t t = 0; t < frames; ++t) out.at(c, t) = latent.at(src, t);
  }
  return out;
}

Var channel_flip(Var latent, std::size_t half) {
  check_latent(latent.shape(), half, "channel_flip");
  return numerics::concat_rows(numerics::slice_rows(latent, half, 2 * half),
                               numerics::slice_rows(latent, 0, half));
}

SpectralAttention::SpectralAttention(AttentionConfig config, numerics::ParameterStore& store,
                                     const std::string& prefix)
    : config_(config) {
  const std::size_t two_d = 2 * config_.half_channels;
  fc1_w_ = &store.add(prefix + ".fc1.weight", {two_d, config_.hidden});
  fc1_b_ = &store.add(prefix + ".fc1.bias", {config_.hidden});
  fc2_w_ = &store.add(prefix + ".fc2.weight", {config_.hidden, 1});
  fc2_b_ = &store.add(prefix + ".fc2.bias", {1});
  proj_w_ = &store.add(prefix + ".proj.weight", {two_d, config_.half_channels});
  proj_b_ = &store.add(prefix + ".proj.bias", {config_.half_channels});
}

void SpectralAttention::init(Rng& rng) {
  const std::size_t two_d = 2 * config_.half_channels;
  init_linear(fc1_w_->value, two_d, rng);
  init_linear(fc2_w_->value, config_.hidden, rng);
  init_leaky(proj_w_->value, two_d, config_.slope, rng);
  fc1_b_->value.fill(0.0);
  fc2_b_->value.fill(0.0);
  proj_b_->value.fill(0.0);
}

Var SpectralAttention::scores(Graph& g, Var latent) const {
  check_latent(latent.shape(), config_.half_channels, "attention_scores");
  const std::size_t frames = latent.shape()[1];
  Var frames_major = numerics::transpose(latent);
  Var h = numerics::tanh(numerics::affine(frames_major, g.parameter(*fc1_w_), g.parameter(*fc1_b_)));
  Var s = numerics::affine(h, g.parameter(*fc2_w_), g.parameter(*fc2_b_));
  return numerics::reshape(numerics::sigmoid(s), {frames});
}

Var SpectralAttention::attend_project(Graph& g, Var latent, Var weights) const {
  check_latent(latent.shape(), config_.half_channels, "attend_project");
  if (weights.value().size() != latent.shape()[1]) {
    throw std::invalid_argument("attend_project: " + std::to_string(weights.value().size()) +
                                " weights for " + std::to_string(latent.shape()[1]) + " frames");
  }
  Var weighted = numerics::transpose(numerics::scale_frames(latent, weights));
  Var z = numerics::affine(weighted, g.parameter(*proj_w_), g.parameter(*proj_b_));
  return numerics::transpose(numerics::leaky_relu(z, config_.slope));
}

SpectralAttention::Branches SpectralAttention::forward(Graph& g, Var latent) const {
  Branches b;
  b.flipped = channel_flip(latent, config_.half_channels);
  const std::array<Var, 2> inputs{latent, b.flipped};
  for (std::size_t k = 0; k < 2; ++k) {
    b.weights[k] = scores(g, inputs[k]);
    b.attended[k] = attend_project(g, inputs[k], b.weights[k]);
  }
  return b;
}

void export_attention(const std::vector<double>& weights, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  char buf[64];
  for (double w : weights) {
    std::snprintf(buf, sizeof buf, "%.17g\n", w);
    out << buf;
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<double> read_attention(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(std::stod(line));
  }
  return out;
}

}  // namespace mirnet::model

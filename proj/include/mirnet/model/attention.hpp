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
#include <filesystem>
#include <string>
#include <vector>

#include "mirnet/numerics/autodiff.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::model {

/// Swaps the two D-channel halves of a [2D x T] latent: rows D..2D-1 move
/// to the top. Applying it twice is the identity.
numerics::Tensor channel_flip(const numerics::Tensor& latent, std::size_t half);
numerics::Var channel_flip(numerics::Var latent, std::size_t half);

struct AttentionConfig {
  std::size_t half_channels = 257;  // D
  std::size_t hidden = 64;
  double slope = 0.2;
};

/// Frame-wise temporal attention with one scorer and one projection shared by
/// both talker branches.
///
/// Branch k scores its latent V_k (V_1 = encoder output, V_2 = its channel
/// flip) with w_t = sigmoid(fc2(tanh(fc1(V_k[:, t])))), then projects the
/// weighted frames: Z_k[:, t] = leaky_relu(proj(w_t * V_k[:, t])).
/// Because everything is shared, flipping V_1 exactly swaps the branches.
class SpectralAttention {
 public:
  SpectralAttention(AttentionConfig config, numerics::ParameterStore& store,
                    const std::string& prefix = "attention");

  void init(Rng& rng);

  /// [2D x T] -> [T], every weight in (0, 1).
  numerics::Var scores(numerics::Graph& g, numerics::Var latent) const;
  /// [2D x T] weighted by w [T], projected to [D x T].
  numerics::Var attend_project(numerics::Graph& g, numerics::Var latent, numerics::Var weights) const;

  struct Branches {
    numerics::Var flipped;
    std::array<numerics::Var, 2> weights;
    std::array<numerics::Var, 2> attended;
  };
  Branches forward(numerics::Graph& g, numerics::Var latent) const;

  const AttentionConfig& config() const { return config_; }

 private:
  AttentionConfig config_;
  numerics::Parameter* fc1_w_;
  numerics::Parameter* fc1_b_;
  numerics::Parameter* fc2_w_;
  numerics::Parameter* fc2_b_;
  numerics::Parameter* proj_w_;
  numerics::Parameter* proj_b_;
};

/// One weight per line as decimal text (17 significant digits).
void export_attention(const std::vector<double>& weights, const std::filesystem::path& path);
std::vector<double> read_attention(const std::filesystem::path& path);

}  // namespace mirnet::model

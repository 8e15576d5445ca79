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
#include <string>
#include <vector>

#include "mirnet/numerics/autodiff.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::model {

/// Six 1-D convolution layers, each followed by leaky ReLU.
/// The last layer has 2 x input_bins channels: one half per talker.
struct EncoderConfig {
  std::size_t input_bins = 257;
  std::vector<std::size_t> channels{512, 512, 512, 512, 1500, 514};
  std::vector<std::size_t> kernels{5, 3, 3, 1, 1, 1};
  double slope = 0.2;

  /// The reference layer table with the hidden widths divided by `scale`.
  /// The final width always stays 2 x bins.
  static EncoderConfig table(std::size_t bins = 257, std::size_t scale = 1);

  /// Throws std::invalid_argument when the layer lists are inconsistent,
  /// a kernel is even, or the last width is not 2 x input_bins.
  void validate() const;

  std::size_t latent_channels() const { return channels.back(); }
};

class Encoder {
 public:
  Encoder(EncoderConfig config, numerics::ParameterStore& store,
          const std::string& prefix = "encoder");

  /// He-uniform weights over fan-in C_in K, zero bias.
  void init(Rng& rng);

  /// [bins x T] -> [2D x T].
  numerics::Var encode(numerics::Graph& g, numerics::Var spectrogram) const;

  const EncoderConfig& config() const { return config_; }
  /// C_out * C_in * K + C_out for layer `i`.
  std::size_t layer_parameter_count(std::size_t i) const;

 private:
  EncoderConfig config_;
  std::vector<numerics::Parameter*> weights_;
  std::vector<numerics::Parameter*> biases_;
};

}  // namespace mirnet::model

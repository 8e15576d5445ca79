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

/// Residual 2-D backbone. Widths {64,128,256,512} with two blocks per stage
/// is the ResNet-18 layout; the default is a reduced one for desk-scale runs.
struct BackboneConfig {
  std::vector<std::size_t> widths{16, 32, 64, 128};
  std::size_t blocks = 1;
  std::size_t embed_dim = 256;
  double slope = 0.2;

  static BackboneConfig resnet18(std::size_t embed_dim = 256);
  void validate() const;
  /// Frames needed to survive the stride-2 stage entries: 2^(stages-1).
  std::size_t min_frames() const;
};

/// Speaker embedding from a [D x T] attended map.
///
/// The map is one input channel over (frequency, time). A 3x3 stem is followed
/// by basic residual blocks (two 3x3 convolutions with leaky ReLU). The first
/// block of every stage after the first halves both axes with stride 2 and uses
/// a 1x1 strided projection on the shortcut; all other shortcuts are identity.
/// 3x3 convolutions pad frequency with zeros and time by repeating edge frames,
/// so a map that is constant over time stays constant over time.
/// Output: mean over frequency, temporal average pooling, affine to embed_dim.
class Embedder {
 public:
  Embedder(BackboneConfig config, std::size_t input_bins, numerics::ParameterStore& store,
           const std::string& prefix = "backbone");

  void init(Rng& rng);

  numerics::Var embed(numerics::Graph& g, numerics::Var attended) const;

  const BackboneConfig& config() const { return config_; }
  std::size_t input_bins() const { return input_bins_; }

 private:
  struct Conv {
    numerics::Parameter* weight = nullptr;
    numerics::Parameter* bias = nullptr;
  };
  struct Block {
    Conv conv1;
    Conv conv2;
    Conv shortcut;  // weight == nullptr for identity
    std::size_t stride = 1;
  };

  Conv add_conv(numerics::ParameterStore& store, const std::string& name, std::size_t c_out,
                std::size_t c_in, std::size_t k);
  numerics::Var conv3x3(numerics::Graph& g, numerics::Var x, const Conv& c, std::size_t stride) const;

  BackboneConfig config_;
  std::size_t input_bins_;
  Conv stem_;
  std::vector<Block> blocks_;
  numerics::Parameter* embed_w_;
  numerics::Parameter* embed_b_;
};

/// Single affine map from the embedding to class logits.
class Classifier {
 public:
  Classifier(std::size_t embed_dim, std::size_t classes, numerics::ParameterStore& store,
             const std::string& prefix = "classifier");

  void init(Rng& rng);
  numerics::Var classify(numerics::Graph& g, numerics::Var embedding) const;
  std::size_t classes() const { return classes_; }

 private:
  std::size_t classes_;
  numerics::Parameter* weight_;
  numerics::Parameter* bias_;
};

}  // namespace mirnet::model

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

#include <cmath>
#include <cstddef>

#include "mirnet/numerics/tensor.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::model {

/// He-uniform for a layer followed by leaky ReLU with the given negative slope:
/// variance 2 / ((1 + slope^2) fan_in) keeps activations at unit scale.
inline void init_leaky(numerics::Tensor& w, std::size_t fan_in, double slope, Rng& rng) {
  const double bound = std::sqrt(6.0 / ((1.0 + slope * slope) * static_cast<double>(fan_in)));
  for (double& v : w.data()) v = uniform(rng, -bound, bound);
}

/// LeCun-uniform (variance 1 / fan_in) for linear and tanh layers.
inline void init_linear(numerics::Tensor& w, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
  for (double& v : w.data()) v = uniform(rng, -bound, bound);
}

}  // namespace mirnet::model

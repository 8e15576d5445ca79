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

#include <cstdint>
#include <string>
#include <vector>

#include "mirnet/numerics/grad_check.hpp"

namespace mirnet::harness {

struct NamedCheck {
  std::string name;
  numerics::GradCheckResult result;
};

inline constexpr double kGradcheckStep = 1e-5;
inline constexpr double kGradcheckTolerance = 1e-4;

struct GradcheckReport {
  std::vector<NamedCheck> checks;
  double max_rel_error = 0.0;
  double seconds = 0.0;

  /// Every check under tolerance, and no check lost more than half of its
  /// coordinates to breakpoint crossings.
  bool passed() const;
};

/// Central-difference checks of every differentiable op at random points in
/// [-2, 2], then of the composed model (encoder, attention, backbone,
/// classifier, PIT loss) in a reduced configuration on a 257 x 8 input:
/// every input coordinate plus `per_param` random coordinates per parameter.
GradcheckReport run_gradcheck_suite(std::uint64_t seed, std::size_t per_param = 8);

}  // namespace mirnet::harness

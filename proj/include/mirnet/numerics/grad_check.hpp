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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mirnet/numerics/autodiff.hpp"

namespace mirnet::numerics {

/// Outcome of comparing an analytic gradient with central differences.
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  /// Coordinates left out because x-h, x or x+h fall on different pieces of a
  /// piecewise op (see BranchTrace); the derivative is not defined across them.
  std::size_t skipped = 0;
  /// Where the worst coordinate was found ("input[12]" or "<param>[i]").
  std::string worst;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// |analytic - numeric| / max(1, |analytic|, |numeric|)
double relative_error(double analytic, double numeric);

/// Builds a scalar on the graph from the given input leaf.
using ScalarFunction = std::function<Var(Graph&, Var)>;

/// Central-difference estimate of df/dx at the listed coordinates (all when empty).
/// Throws if any evaluation is non-finite. When `smooth` is given it receives,
/// per coordinate, whether x-h, x and x+h share one branch digest.
std::vector<double> central_differences(const std::function<double(const Tensor&)>& f,
                                        const Tensor& point, double step,
                                        const std::vector<std::size_t>& coords,
                                        std::vector<bool>* smooth = nullptr);

/// Compares a supplied gradient with central differences of f, leaving out
/// coordinates whose stencil crosses a breakpoint. Useful for checking the
/// checker itself with a deliberately wrong gradient.
GradCheckResult compare_with_central_differences(const std::function<double(const Tensor&)>& f,
                                                 const Tensor& point, const Tensor& analytic,
                                                 double step,
                                                 const std::vector<std::size_t>& coords = {});

/// Differentiates f at `point` with backward() and checks it against central
/// differences at `coords` (every coordinate when empty).
GradCheckResult grad_check(const ScalarFunction& f, const Tensor& point, double step,
                           const std::vector<std::size_t>& coords = {});

/// Checks d(loss)/d(parameter) for `per_param` randomly chosen coordinates of
/// every parameter in the store (all coordinates when a parameter is smaller).
GradCheckResult grad_check_parameters(ParameterStore& store,
                                      const std::function<Var(Graph&)>& loss, double step,
                                      std::size_t per_param, std::uint64_t seed);

}  // namespace mirnet::numerics

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
#include <vector>

#include "mirnet/numerics/autodiff.hpp"

namespace mirnet::pit {

inline constexpr std::size_t kMaxSlots = 8;

/// A permutation and its total cost.
struct Assignment {
  std::vector<std::size_t> mapping;  // slot i -> column mapping[i]
  double cost = 0.0;
};

/// Minimum-cost bijection of an N x N cost matrix (row-major, N*N entries) by
/// exhaustive enumeration in lexicographic order. Ties keep the
/// lexicographically smallest permutation.
Assignment assign(const std::vector<double>& cost, std::size_t n);
Assignment assign(const std::vector<std::vector<double>>& cost);

struct PermutationAssignment {
  std::vector<std::size_t> mapping;  // slot i -> labels[mapping[i]]
  numerics::Var loss;                // sum of the selected cross-entropies
  std::vector<double> all_losses;    // one per permutation, lexicographic order
};

/// Permutation-invariant cross-entropy: min over permutations p of
/// sum_i CE(logits[i], labels[p(i)]), each sum taken smallest term first so
/// that listing the slots in another order gives the same value. Only the
/// chosen pairings are recorded into the loss, so the gradient is that of the
/// winning assignment.
PermutationAssignment pit_loss(const std::vector<numerics::Var>& logits,
                               const std::vector<std::size_t>& labels);

/// All permutations of {0..n-1} in lexicographic order; n is at most kMaxSlots.
std::vector<std::vector<std::size_t>> permutations(std::size_t n);

}  // namespace mirnet::pit

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

#include "mirnet/pit/pit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mirnet/numerics/ops.hpp"

namespace mirnet::pit {

std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  if (n > kMaxSlots) {
    throw std::invalid_argument("permutations: n=" + std::to_string(n) + " exceeds enumeration bound " +
                                std::to_string(kMaxSlots));
  }
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Assignment assign(const std::vector<double>& cost, std::size_t n) {
  if (n == 0 || cost.size() != n * n) {
    throw std::invalid_argument("assign: cost matrix must be square and non-empty, got " +
                                std::to_string(cost.size()) + " entries for n=" + std::to_string(n));
  }
  if (n > kMaxSlots) {
    throw std::invalid_argument("assign: n=" + std::to_string(n) + " exceeds enumeration bound " +
                                std::to_string(kMaxSlots));
  }
  for (double c : cost) {
    if (!std::isfinite(c)) throw std::invalid_argument("assign: cost matrix has a non-finite entry");
  }
  Assignment best;
  bool first = true;
  for (const auto& p : permutations(n)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + p[i]];
    if (first || total < best.cost) {
      best.mapping = p;
      best.cost = total;
      first = false;
    }
  }
  return best;
}

Assignment assign(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  std::vector<double> flat;
  for (const auto& row : cost) {
    if (row.size() != n) {
      throw std::invalid_argument("assign: cost matrix is not square (" + std::to_string(n) + " rows, a row of " +
                                  std::to_string(row.size()) + ")");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return assign(flat, n);
}

PermutationAssignment pit_loss(const std::vector<numerics::Var>& logits,
                               const std::vector<std::size_t>& labels) {
  const std::size_t n = logits.size();
  if (n == 0 || n > kMaxSlots) {
    throw std::invalid_argument("pit_loss: number of slots must be in [1, " + std::to_string(kMaxSlots) +
                                "], got " + std::to_string(n));
  }
  if (labels.size() != n) {
    throw std::invalid_argument("pit_loss: " + std::to_string(n) + " slots but " +
                                std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (labels[i] == labels[j]) {
        throw std::invalid_argument("pit_loss: duplicate label " + std::to_string(labels[i]));
      }
    }
  }
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = logits[i].value();
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[j] >= l.size()) {
        throw std::invalid_argument("pit_loss: label " + std::to_string(labels[j]) + " out of range for " +
                                    std::to_string(l.size()) + " classes");
      }
      cost[i * n + j] = numerics::cross_entropy_value(l, labels[j]);
    }
  }
  // Terms are summed smallest first, so a total does not depend on the order
  // in which the slots were listed.
  PermutationAssignment out;
  bool first = true;
  double best = 0.0;
  std::vector<double> terms(n);
  for (const auto& p : permutations(n)) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = cost[i * n + p[i]];
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (double t : terms) total += t;
    out.all_losses.push_back(total);
    if (first || total < best) {
      best = total;
      out.mapping = p;
      first = false;
    }
  }
  if (numerics::BranchTrace::active()) {
    for (std::size_t m : out.mapping) numerics::BranchTrace::record(m);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cost[a * n + out.mapping[a]] < cost[b * n + out.mapping[b]];
  });
  numerics::Var loss = numerics::cross_entropy(logits[order[0]], labels[out.mapping[order[0]]]);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = order[k];
    loss = numerics::add(loss, numerics::cross_entropy(logits[i], labels[out.mapping[i]]));
  }
  out.loss = loss;
  return out;
}

}  // namespace mirnet::pit

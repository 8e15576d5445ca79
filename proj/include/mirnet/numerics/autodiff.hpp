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
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mirnet/numerics/tensor.hpp"

namespace mirnet::numerics {

/// A named trainable array together with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Owns every Parameter of a model. Addresses are stable for the store's
/// lifetime, so modules may keep raw pointers into it.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  /// Registers a zero-initialised parameter. Names must be unique.
  Parameter& add(const std::string& name, Shape shape);

  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  Parameter& get(const std::string& name);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  /// Total number of scalar values over all parameters.
  std::size_t scalar_count() const;
  /// Number of registered parameters whose name starts with `prefix`.
  std::size_t count_with_prefix(const std::string& prefix) const;

  void zero_grad();
  /// Copies of every value, in registration order.
  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// While alive, collects on the current thread which side of its breakpoint
/// every element of a piecewise op lands on (leaky ReLU sign, chosen
/// permutation). Two evaluations with the same digest lie on the same smooth
/// piece, so a finite difference between them is meaningful.
class BranchTrace {
 public:
  BranchTrace();
  ~BranchTrace();
  BranchTrace(const BranchTrace&) = delete;
  BranchTrace& operator=(const BranchTrace&) = delete;

  std::uint64_t digest() const;

  static bool active();
  static void record(std::uint64_t branch);

 private:
  std::uint64_t saved_;
  bool saved_active_;
};

class Graph;

/// Handle to a node recorded on a Graph.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

/// Reverse-mode tape. Nodes are recorded in creation order, which is a
/// topological order, and backward() walks them once in reverse.
/// A graph is meant for a single forward/backward pass on one thread.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf whose gradient is kept on the graph (read it with grad()).
  Var variable(Tensor value);
  /// Leaf bound to a parameter. Repeated calls return the same node, so a
  /// shared parameter contributes one accumulated gradient.
  Var parameter(Parameter& p);

  /// Records an op output. `fn` reads grad(self) and accumulates into inputs
  /// through grad_buffer(); it is only kept if some input requires a gradient.
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  /// Gradient of the last backward() target with respect to `v`
  /// (zeros if nothing flowed into it).
  Tensor grad(Var v) const;
  /// Mutable gradient slot of node `id`, allocated as zeros on first use.
  Tensor& grad_buffer(std::size_t id);

  /// Seeds d(loss)/d(loss) = 1, runs every recorded backward function once in
  /// reverse order and adds leaf gradients into their Parameters.
  /// Returns the number of op nodes visited.
  std::size_t backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  Var push(Node node);

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

}  // namespace mirnet::numerics

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

#include "mirnet/numerics/autodiff.hpp"

#include <stdexcept>

namespace mirnet::numerics {

namespace {

struct TraceState {
  bool active = false;
  std::uint64_t hash = 0;
};

thread_local TraceState trace_state;

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

}  // namespace

BranchTrace::BranchTrace() : saved_(trace_state.hash), saved_active_(trace_state.active) {
  trace_state.active = true;
  trace_state.hash = kFnvOffset;
}

BranchTrace::~BranchTrace() {
  trace_state.active = saved_active_;
  trace_state.hash = saved_;
}

std::uint64_t BranchTrace::digest() const { return trace_state.hash; }

bool BranchTrace::active() { return trace_state.active; }

void BranchTrace::record(std::uint64_t branch) { trace_state.hash = (trace_state.hash ^ branch) * kFnvPrime; }

Parameter& ParameterStore::add(const std::string& name, Shape shape) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Tensor(shape);
  p->grad = Tensor(std::move(shape));
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterStore::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterStore::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

Parameter& ParameterStore::get(const std::string& name) {
  Parameter* p = find(name);
  if (!p) throw std::out_of_range("no parameter named " + name);
  return *p;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

std::size_t ParameterStore::count_with_prefix(const std::string& prefix) const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p->name.compare(0, prefix.size(), prefix) == 0) ++n;
  }
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.fill(0.0);
}

std::vector<Tensor> ParameterStore::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterStore::restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) {
    throw std::invalid_argument("restore: expected " + std::to_string(params_.size()) +
                                " tensors, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != params_[i]->value.shape()) {
      throw std::invalid_argument("restore: shape mismatch for " + params_[i]->name);
    }
    params_[i]->value = values[i];
  }
}

const Tensor& Var::value() const { return graph->value(*this); }

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Graph::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Node n;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Graph::record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.graph != this) throw std::invalid_argument("op inputs belong to a different graph");
    if (nodes_[in.id].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  return n.has_grad ? n.grad : Tensor(n.value.shape());
}

Tensor& Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(n.value.shape());
    n.has_grad = true;
  }
  return n.grad;
}

std::size_t Graph::backward(Var loss) {
  if (loss.graph != this) throw std::invalid_argument("backward: loss belongs to another graph");
  if (nodes_[loss.id].value.size() != 1) {
    throw std::invalid_argument("backward needs a scalar loss, got shape " +
                                shape_str(nodes_[loss.id].value.shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  grad_buffer(loss.id).fill(1.0);

  std::size_t visited = 0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.has_grad) continue;
    if (n.backward) {
      n.backward(*this, id);
      ++visited;
    } else if (n.param) {
      Tensor& pg = n.param->grad;
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
    }
  }
  return visited;
}

}  // namespace mirnet::numerics

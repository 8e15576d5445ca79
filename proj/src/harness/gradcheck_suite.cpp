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

#include "mirnet/harness/gradcheck_suite.hpp"

#include <algorithm>
#include <chrono>

#include "mirnet/model/attention.hpp"
#include "mirnet/model/network.hpp"
#include "mirnet/numerics/ops.hpp"
#include "mirnet/pit/pit.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::harness {

using numerics::Graph;
using numerics::Shape;
using numerics::Tensor;
using numerics::Var;

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor t(shape);
  for (double& v : t.data()) v = uniform(rng, lo, hi);
  return t;
}

// Reduces any output to a scalar through a fixed random projection, so that
// every output element contributes with its own weight.
Var project(Graph& g, Var y, const Tensor& weights) {
  const std::size_t n = y.value().size();
  Var row = numerics::reshape(y, {1, n});
  Var z = numerics::affine(row, g.constant(weights.reshaped({n, 1})), g.constant(Tensor::vector({0.0})));
  return numerics::sum(z);
}

struct Suite {
  Rng rng;
  GradcheckReport report;

  // `op` maps the checked leaf to any tensor; the suite projects it to a scalar.
  template <typename Op>
  void check(const std::string& name, const Tensor& point, Op op) {
    Graph probe;
    const std::size_t out_size = op(probe, probe.constant(point)).value().size();
    const Tensor weights = random_tensor({out_size}, rng, -1.0, 1.0);
    auto f = [&](Graph& g, Var x) { return project(g, op(g, x), weights); };
    report.checks.push_back({name, numerics::grad_check(f, point, kGradcheckStep)});
  }
};

void op_checks(Suite& s) {
  Rng& rng = s.rng;
  const Tensor x2 = random_tensor({3, 7}, rng);
  const Tensor w1 = random_tensor({4, 3, 3}, rng);
  const Tensor w1k5 = random_tensor({2, 3, 5}, rng);
  const Tensor b4 = random_tensor({4}, rng);
  const Tensor b2 = random_tensor({2}, rng);
  s.check("conv1d/input", x2, [&](Graph& g, Var x) { return numerics::conv1d(x, g.constant(w1), g.constant(b4)); });
  s.check("conv1d/weight", w1k5, [&](Graph& g, Var w) {
    return numerics::conv1d(g.constant(x2), w, g.constant(b2));
  });
  s.check("conv1d/bias", b4, [&](Graph& g, Var b) { return numerics::conv1d(g.constant(x2), g.constant(w1), b); });

  const Tensor x3 = random_tensor({2, 7, 6}, rng);
  const Tensor w2 = random_tensor({3, 2, 3, 3}, rng);
  const Tensor b3 = random_tensor({3}, rng);
  for (std::size_t stride : {1, 2}) {
    const std::string tag = "/stride" + std::to_string(stride);
    s.check("conv2d/input" + tag, x3, [&](Graph& g, Var x) {
      return numerics::conv2d(x, g.constant(w2), g.constant(b3), stride);
    });
    s.check("conv2d/weight" + tag, w2, [&](Graph& g, Var w) {
      return numerics::conv2d(g.constant(x3), w, g.constant(b3), stride);
    });
    s.check("conv2d/bias" + tag, b3, [&](Graph& g, Var b) {
      return numerics::conv2d(g.constant(x3), g.constant(w2), b, stride);
    });
  }
  s.check("pad_freq_zero_time_edge", x3, [](Graph&, Var x) { return numerics::pad_freq_zero_time_edge(x, 1); });

  const Tensor wa = random_tensor({7, 5}, rng);
  const Tensor ba = random_tensor({5}, rng);
  const Tensor v7 = random_tensor({7}, rng);
  s.check("affine/vector", v7, [&](Graph& g, Var x) { return numerics::affine(x, g.constant(wa), g.constant(ba)); });
  s.check("affine/rows", x2, [&](Graph& g, Var x) { return numerics::affine(x, g.constant(wa), g.constant(ba)); });
  s.check("affine/weight", wa, [&](Graph& g, Var w) { return numerics::affine(g.constant(x2), w, g.constant(ba)); });
  s.check("affine/bias", ba, [&](Graph& g, Var b) { return numerics::affine(g.constant(x2), g.constant(wa), b); });

  s.check("leaky_relu", x2, [](Graph&, Var x) { return numerics::leaky_relu(x, 0.2); });
  s.check("sigmoid", x2, [](Graph&, Var x) { return numerics::sigmoid(x); });
  s.check("tanh", x2, [](Graph&, Var x) { return numerics::tanh(x); });
  s.check("mean_over_time", x2, [](Graph&, Var x) { return numerics::mean_over_time(x); });
  s.check("mean_over_freq", x3, [](Graph&, Var x) { return numerics::mean_over_freq(x); });
  s.check("cross_entropy", v7, [](Graph&, Var x) { return numerics::cross_entropy(x, 2); });
  s.check("transpose", x2, [](Graph&, Var x) { return numerics::transpose(x); });
  const Tensor lat = random_tensor({6, 5}, rng);
  s.check("channel_flip", lat, [](Graph&, Var x) { return model::channel_flip(x, 3); });
  const Tensor wt = random_tensor({7}, rng, 0.1, 0.9);
  s.check("scale_frames/input", x2, [&](Graph& g, Var x) { return numerics::scale_frames(x, g.constant(wt)); });
  s.check("scale_frames/weights", wt, [&](Graph& g, Var w) { return numerics::scale_frames(g.constant(x2), w); });
  s.check("add", x2, [](Graph&, Var x) { return numerics::add(x, numerics::tanh(x)); });
  s.check("scale", x2, [](Graph&, Var x) { return numerics::scale(x, -1.7); });
  s.check("sum", x2, [](Graph&, Var x) { return numerics::sum(x); });
  s.check("reshape", x2, [](Graph&, Var x) { return numerics::reshape(x, {7, 3}); });
  s.check("l2_normalize", v7, [](Graph&, Var x) { return numerics::l2_normalize(x); });
  const Tensor logits = random_tensor({2, 5}, rng);
  s.check("pit_loss", logits, [](Graph&, Var x) {
    std::vector<Var> slots{numerics::reshape(numerics::slice_rows(x, 0, 1), {5}),
                           numerics::reshape(numerics::slice_rows(x, 1, 2), {5})};
    return pit::pit_loss(slots, {3, 1}).loss;
  });
}

model::ModelConfig reduced_config() {
  model::ModelConfig c;
  c.stft.nfft = 512;
  c.encoder_scale = 64;
  c.attention_hidden = 8;
  c.backbone.widths = {2, 4};
  c.backbone.blocks = 1;
  c.backbone.embed_dim = 4;
  c.num_classes = 3;
  return c;
}

void model_checks(Suite& s, std::uint64_t seed, std::size_t per_param) {
  model::SpeakerNet net(reduced_config());
  net.init(derive_seed(seed, 1));
  const Tensor spec = random_tensor({net.config().bins(), 8}, s.rng);
  auto loss_from = [&net](Graph& g, Var x) {
    const auto r = net.forward(g, x);
    return pit::pit_loss({r.logits[0], r.logits[1]}, {0, 2}).loss;
  };
  s.report.checks.push_back({"model/input", numerics::grad_check(loss_from, spec, kGradcheckStep)});
  s.report.checks.push_back(
      {"model/parameters",
       numerics::grad_check_parameters(
           net.parameters(), [&](Graph& g) { return loss_from(g, g.constant(spec)); }, kGradcheckStep, per_param,
           derive_seed(seed, 2))});
}

}  // namespace

bool GradcheckReport::passed() const {
  for (const auto& c : checks) {
    if (!(c.result.max_rel_error < kGradcheckTolerance)) return false;
    if (c.result.skipped > c.result.coordinates) return false;
  }
  return !checks.empty();
}

GradcheckReport run_gradcheck_suite(std::uint64_t seed, std::size_t per_param) {
  const auto start = std::chrono::steady_clock::now();
  Suite s{Rng(seed), {}};
  op_checks(s);
  model_checks(s, seed, per_param);
  for (const auto& c : s.report.checks) s.report.max_rel_error = std::max(s.report.max_rel_error, c.result.max_rel_error);
  s.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return std::move(s.report);
}

}  // namespace mirnet::harness

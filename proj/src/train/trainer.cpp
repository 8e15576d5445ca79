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

#include "mirnet/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mirnet/numerics/ops.hpp"
#include "mirnet/pit/pit.hpp"

namespace mirnet::train {

using numerics::Graph;
using numerics::Tensor;

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and non-negative");
  }
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
}

std::vector<MixturePlan> epoch_pairs(const std::vector<LabeledWave>& utterances, std::size_t count, Rng& rng) {
  std::vector<std::size_t> labels;
  for (const auto& u : utterances) labels.push_back(u.label);
  std::sort(labels.begin(), labels.end());
  if (std::unique(labels.begin(), labels.end()) - labels.begin() < 2) {
    throw std::invalid_argument("epoch_pairs: need utterances from at least 2 speakers");
  }
  std::vector<std::size_t> order(utterances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<MixturePlan> plans;
  plans.reserve(count);
  std::vector<std::size_t> partners;
  for (std::size_t n = 0; n < count; ++n) {
    if (n % order.size() == 0) shuffle(order, rng);
    const std::size_t a = order[n % order.size()];
    partners.clear();
    for (std::size_t j = 0; j < utterances.size(); ++j) {
      if (utterances[j].label != utterances[a].label) partners.push_back(j);
    }
    const std::size_t b = partners[uniform_index(rng, partners.size())];
    plans.push_back({a, b, rng()});
  }
  return plans;
}

RenderedMixture render_mixture(const frontend::Waveform& a, const frontend::Waveform& b, std::uint64_t seed,
                               const model::ModelConfig& config) {
  const std::size_t len = config.segment_samples();
  Rng rng(seed);
  const auto seg_a = frontend::sample_segment(frontend::pad_to(a, len), config.segment_seconds, rng);
  const auto seg_b = frontend::sample_segment(frontend::pad_to(b, len), config.segment_seconds, rng);
  RenderedMixture r;
  r.sample = frontend::mix(seg_a.wave, seg_b.wave);
  r.sample.offsets = {seg_a.offset, seg_b.offset};
  r.sample.seed = seed;
  r.features = model::features(r.sample.mixture, config);
  return r;
}

std::vector<Example> prepare(const std::vector<LabeledWave>& utterances, const std::vector<MixturePlan>& plans,
                             const model::ModelConfig& config) {
  std::vector<Example> out(plans.size());
  // Every example depends only on its own plan, so the result is the same for any thread count.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    out[i].features = render_mixture(utterances[p.a].wave, utterances[p.b].wave, p.seed, config).features;
    out[i].label_a = utterances[p.a].label;
    out[i].label_b = utterances[p.b].label;
  }
  return out;
}

namespace {

std::size_t argmax(const Tensor& t) {
  const auto d = t.data();
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

}  // namespace

bool assignment_correct(const std::vector<numerics::Tensor>& logits, const std::vector<std::size_t>& labels) {
  Graph g;
  std::vector<numerics::Var> vars;
  for (const auto& z : logits) vars.push_back(g.constant(z));
  const auto pa = pit::pit_loss(vars, labels);
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (argmax(logits[k]) != labels[pa.mapping[k]]) return false;
  }
  return true;
}

Validation validate(const model::SpeakerNet& net, const std::vector<Example>& examples) {
  if (examples.empty()) throw std::invalid_argument("validate: empty split");
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    Graph g;
    const auto r = net.forward(g, g.constant(ex.features));
    const std::vector<std::size_t> labels{ex.label_a, ex.label_b};
    loss += pit::pit_loss({r.logits[0], r.logits[1]}, labels).loss.value().item();
    if (assignment_correct({r.logits[0].value(), r.logits[1].value()}, labels)) ++correct;
  }
  const double n = static_cast<double>(examples.size());
  return {loss / n, static_cast<double>(correct) / n};
}

std::string format_epoch(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu\t%.10f\t%.10f\t%.6f", r.epoch, r.train_loss, r.val_loss, r.val_acc);
  return buf;
}

OptimizerState::OptimizerState(const TrainConfig& cfg, const numerics::ParameterStore& store) : cfg_(cfg) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    m_.emplace_back(store[i].value.shape());
    if (cfg_.optimizer == Optimizer::adam) v_.emplace_back(store[i].value.shape());
  }
}

void OptimizerState::step(numerics::ParameterStore& store) {
  ++t_;
  const double lr = cfg_.learning_rate;
  if (cfg_.optimizer == Optimizer::sgd) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      auto p = store[i].value.data();
      const auto g = store[i].grad.data();
      auto m = m_[i].data();
      for (std::size_t j = 0; j < p.size(); ++j) {
        m[j] = cfg_.momentum * m[j] + g[j];
        p[j] -= lr * m[j];
      }
    }
    return;
  }
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto p = store[i].value.data();
    const auto g = store[i].grad.data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.epsilon);
    }
  }
}

double batch_gradient(model::SpeakerNet& net, const std::vector<Example>& batch) {
  auto& store = net.parameters();
  store.zero_grad();
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& ex : batch) {
    Graph g;
    const auto r = net.forward(g, g.constant(ex.features));
    const auto pa = pit::pit_loss({r.logits[0], r.logits[1]}, {ex.label_a, ex.label_b});
    total += pa.loss.value().item();
    g.backward(numerics::scale(pa.loss, inv));
  }
  return total * inv;
}

namespace {

bool gradients_finite(const numerics::ParameterStore& store) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (!store[i].grad.all_finite()) return false;
  }
  return true;
}

std::string largest_gradient(const numerics::ParameterStore& store) {
  std::string name = "(none)";
  double best = -1.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (double g : store[i].grad.data()) {
      const double a = std::isfinite(g) ? std::abs(g) : std::numeric_limits<double>::infinity();
      if (a > best) {
        best = a;
        name = store[i].name;
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " (|grad| = %g)", best);
  return name + buf;
}

}  // namespace

TrainReport train(model::SpeakerNet& net, const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (data.train.empty()) throw std::invalid_argument("train: no training utterances");
  if (data.val.empty()) throw std::invalid_argument("train: no validation utterances");
  const auto start = std::chrono::steady_clock::now();
  const auto& mcfg = net.config();
  auto& store = net.parameters();

  Rng val_rng(derive_seed(cfg.seed, 0x76616c));
  const std::size_t n_val = cfg.val_mixtures ? cfg.val_mixtures : data.val.size();
  const auto val_set = prepare(data.val, epoch_pairs(data.val, n_val, val_rng), mcfg);
  const std::size_t per_epoch = cfg.pairs_per_epoch ? cfg.pairs_per_epoch : data.train.size();

  OptimizerState opt(cfg, store);
  TrainReport report;
  double best_loss = std::numeric_limits<double>::infinity();
  auto best = store.snapshot();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, 0x747261696e, epoch));
    const auto plans = epoch_pairs(data.train, per_epoch, rng);
    const auto examples = prepare(data.train, plans, mcfg);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < examples.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(examples.size(), begin + cfg.batch_size);
      const std::vector<Example> batch(examples.begin() + static_cast<std::ptrdiff_t>(begin),
                                       examples.begin() + static_cast<std::ptrdiff_t>(end));
      const double loss = batch_gradient(net, batch);
      if (!std::isfinite(loss) || !gradients_finite(store)) {
        throw TrainingDiverged(std::string(std::isfinite(loss) ? "non-finite gradient" : "non-finite loss") +
                               " in epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches + 1) +
                               "; largest gradient in " + largest_gradient(store));
      }
      opt.step(store);
      loss_sum += loss;
      ++batches;
    }
    const auto v = validate(net, val_set);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(batches), v.loss, v.accuracy};
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (v.loss < best_loss) {
      best_loss = v.loss;
      best = store.snapshot();
      report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  store.restore(best);
  report.checkpoint_id = "epoch-" + std::to_string(report.best_epoch);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mirnet::train

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

#include <cmath>

#include "doctest.h"
#include "mirnet/model/attention.hpp"
#include "mirnet/model/embedder.hpp"
#include "mirnet/model/network.hpp"
#include "mirnet/numerics/grad_check.hpp"
#include "mirnet/numerics/ops.hpp"
#include "mirnet/pit/pit.hpp"
#include "testing.hpp"

using namespace mirnet;
using namespace mirnet::model;
using namespace mirnet::numerics;
using mirnet::testing::random_tensor;

namespace {

BackboneConfig small_backbone() {
  BackboneConfig c;
  c.widths = {3, 5};
  c.embed_dim = 6;
  return c;
}

ModelConfig small_model() {
  ModelConfig c;
  c.stft.nfft = 32;
  c.stft.frame_ms = 2.0;
  c.stft.hop_ms = 1.0;
  c.segment_seconds = 0.02;
  c.encoder_scale = 64;
  c.attention_hidden = 5;
  c.backbone = small_backbone();
  c.num_classes = 4;
  return c;
}

}  // namespace

TEST_CASE("backbone layout") {
  ParameterStore store;
  Embedder e(small_backbone(), 9, store);
  // stem + stage1 (conv1, conv2) + stage2 (conv1, conv2, shortcut) + embed, each weight and bias
  CHECK(store.size() == 2 * (1 + 2 + 3 + 1));
  CHECK(store.get("backbone.stage2.block1.shortcut.weight").value.shape() == Shape{5, 3, 1, 1});
  CHECK(store.get("backbone.embed.weight").value.shape() == Shape{5, 6});
  CHECK(e.config().min_frames() == 2);

  BackboneConfig r = BackboneConfig::resnet18();
  CHECK(r.widths == std::vector<std::size_t>{64, 128, 256, 512});
  CHECK(r.blocks == 2);
  ParameterStore big;
  Embedder resnet(r, 257, big);
  CHECK(big.count_with_prefix("backbone.stage") == 2 * (4 * 2 * 2 + 3));
}

TEST_CASE("zero parameters give a zero embedding") {
  ParameterStore store;
  Embedder e(small_backbone(), 9, store);
  Rng rng(1);
  Graph g;
  const Tensor out = e.embed(g, g.constant(random_tensor({9, 7}, rng))).value();
  CHECK(out == Tensor({6}, 0.0));
}

TEST_CASE("embedding size does not depend on the frame count") {
  ParameterStore store;
  Embedder e(small_backbone(), 9, store);
  Rng rng(2);
  e.init(rng);
  for (std::size_t frames = 2; frames < 20; ++frames) {
    Graph g;
    CHECK(e.embed(g, g.constant(random_tensor({9, frames}, rng))).shape() == Shape{6});
  }
  Graph g;
  CHECK_THROWS_WITH_AS(e.embed(g, g.constant(random_tensor({9, 1}, rng))), doctest::Contains("at least 2"),
                       std::invalid_argument);
  CHECK_THROWS_AS(e.embed(g, g.constant(random_tensor({8, 4}, rng))), std::invalid_argument);
}

TEST_CASE("temporal pooling of a frame-wise constant map ignores the length") {
  BackboneConfig cfg = small_backbone();
  cfg.widths = {3, 4, 5};
  ParameterStore store;
  Embedder e(cfg, 11, store);
  Rng rng(3);
  e.init(rng);
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store[i].name.ends_with(".bias")) store[i].value = random_tensor(store[i].value.shape(), rng);
  }
  const Tensor column = random_tensor({11}, rng);
  auto embed_constant = [&](std::size_t frames) {
    Tensor z({11, frames});
    for (std::size_t f = 0; f < 11; ++f) {
      for (std::size_t t = 0; t < frames; ++t) z.at(f, t) = column[f];
    }
    Graph g;
    return e.embed(g, g.constant(z)).value();
  };
  const Tensor ref = embed_constant(4);
  for (std::size_t frames : {5, 8, 13, 32}) CHECK(max_abs_diff(embed_constant(frames), ref) < 1e-12);
}

TEST_CASE("classifier") {
  ParameterStore store;
  Classifier cls(4, 4, store);
  Rng rng(4);
  const Tensor emb = random_tensor({4}, rng);
  // A graph binds parameter values on first use, so every pass gets its own.
  auto logits = [&] {
    Graph g;
    return cls.classify(g, g.constant(emb)).value();
  };
  CHECK(cross_entropy_value(logits(), 2) == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  Tensor& w = store.get("classifier.weight").value;
  for (std::size_t i = 0; i < 4; ++i) w.at(i, i) = 1.0;
  CHECK(logits() == emb);

  cls.init(rng);
  const Tensor before = logits();
  for (double& b : store.get("classifier.bias").value.data()) b += 0.75;
  const Tensor after = logits();
  for (std::size_t i = 0; i < 4; ++i) CHECK(after[i] - before[i] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("backbone gradient on a 257 x 8 input") {
  BackboneConfig cfg = small_backbone();
  cfg.widths = {2, 4};
  ParameterStore store;
  Embedder e(cfg, 257, store);
  Rng rng(5);
  e.init(rng);
  const Tensor z = random_tensor({257, 8}, rng);
  auto loss = [&](Graph& g, Var in) { return cross_entropy(e.embed(g, in), 1); };
  std::vector<std::size_t> coords;
  for (std::size_t i = 0; i < z.size(); i += 5) coords.push_back(i);
  auto r = grad_check(loss, z, 1e-5, coords);
  CHECK(r.max_rel_error < 1e-4);
  CHECK(r.skipped < coords.size() / 2);
  auto p = grad_check_parameters(store, [&](Graph& g) { return loss(g, g.constant(z)); }, 1e-5, 6, 9);
  CHECK(p.max_rel_error < 1e-4);
}

TEST_CASE("both branches share one backbone") {
  SpeakerNet net(small_model());
  CHECK(net.parameters().count_with_prefix("backbone.") == 14);
  CHECK(net.parameters().count_with_prefix("classifier.") == 2);
  CHECK(net.parameters().count_with_prefix("attention.") == 6);
}

TEST_CASE("forward shapes and determinism") {
  SpeakerNet net(small_model());
  net.init(6);
  Rng rng(7);
  const Tensor spec = random_tensor({17, 9}, rng);
  Graph g1, g2;
  auto a = net.forward(g1, g1.constant(spec));
  auto b = net.forward(g2, g2.constant(spec));
  for (int k = 0; k < 2; ++k) {
    CHECK(a.identities[k].shape() == Shape{6});
    CHECK(a.logits[k].shape() == Shape{4});
    CHECK(a.identities[k].value() == b.identities[k].value());
    CHECK(a.logits[k].value() == b.logits[k].value());
  }
}

TEST_CASE("a flipped latent swaps identities and logits") {
  SpeakerNet net(small_model());
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    net.init(trial);
    const Tensor latent = random_tensor({34, 6}, rng);
    Graph g;
    auto plain = net.forward_from_latent(g, g.constant(latent));
    auto swapped = net.forward_from_latent(g, g.constant(channel_flip(latent, 17)));
    for (int k = 0; k < 2; ++k) {
      CHECK(max_abs_diff(swapped.identities[k].value(), plain.identities[1 - k].value()) < 1e-10);
      CHECK(max_abs_diff(swapped.logits[k].value(), plain.logits[1 - k].value()) < 1e-10);
    }
  }
}

TEST_CASE("length normalisation is optional") {
  ModelConfig c = small_model();
  c.length_norm = true;
  SpeakerNet net(c);
  net.init(9);
  Rng rng(10);
  Graph g;
  auto r = net.forward(g, g.constant(random_tensor({17, 9}, rng)));
  for (int k = 0; k < 2; ++k) {
    double n = 0.0;
    for (double v : r.identities[k].value().data()) n += v * v;
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("faithful shapes for three seconds of audio") {
  ModelConfig c;
  c.backbone.widths = {2, 2};
  c.backbone.embed_dim = 4;
  CHECK(c.segment_samples() == 48000);
  CHECK(c.segment_frames() == 297);
  SpeakerNet net(c);
  net.init(11);
  Rng rng(12);
  frontend::Waveform w;
  w.samples.resize(48000);
  for (double& s : w.samples) s = uniform(rng, -0.5, 0.5);
  const Tensor feats = features(w, c);
  CHECK(feats.shape() == Shape{257, 297});
  Graph g;
  auto r = net.forward(g, g.constant(feats));
  CHECK(r.latent.shape() == Shape{514, 297});
  CHECK(r.attended[0].shape() == Shape{257, 297});
  CHECK(r.attended[1].shape() == Shape{257, 297});
}

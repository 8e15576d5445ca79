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

#include <algorithm>
#include <fstream>

#include "doctest.h"
#include "mirnet/model/attention.hpp"
#include "mirnet/numerics/ops.hpp"
#include "testing.hpp"

using namespace mirnet;
using namespace mirnet::model;
using namespace mirnet::numerics;
using mirnet::testing::random_tensor;

namespace {

std::vector<std::vector<double>> rows_of(const Tensor& t) {
  std::vector<std::vector<double>> rows(t.dim(0));
  for (std::size_t r = 0; r < t.dim(0); ++r) {
    for (std::size_t c = 0; c < t.dim(1); ++c) rows[r].push_back(t.at(r, c));
  }
  return rows;
}

struct Fixture {
  ParameterStore store;
  SpectralAttention att;
  explicit Fixture(std::size_t half, std::uint64_t seed = 1, std::size_t hidden = 8)
      : att(AttentionConfig{half, hidden, 0.2}, store) {
    Rng rng(seed);
    att.init(rng);
  }
};

}  // namespace

TEST_CASE("channel flip on four rows") {
  Tensor v = Tensor::matrix({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
  CHECK(channel_flip(v, 2) == Tensor::matrix({{3, 3}, {4, 4}, {1, 1}, {2, 2}}));
  CHECK(channel_flip(channel_flip(v, 2), 2) == v);
  CHECK_THROWS_AS(channel_flip(Tensor({5, 2}), 2), std::invalid_argument);
  CHECK_THROWS_AS(channel_flip(v, 3), std::invalid_argument);
}

TEST_CASE("channel flip at the reference size matches direct indexing") {
  Rng rng(2);
  const Tensor v = random_tensor({514, 297}, rng);
  const Tensor f = channel_flip(v, 257);
  REQUIRE(f.shape() == v.shape());
  for (std::size_t c = 0; c < 514; ++c) {
    const std::size_t src = (c + 257) % 514;
    for (std::size_t t = 0; t < 297; ++t) REQUIRE(f.at(c, t) == v.at(src, t));
  }
  Graph g;
  CHECK(channel_flip(g.constant(v), 257).value() == f);
}

TEST_CASE("channel flip is an involution that permutes rows") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t half = 1 + uniform_index(rng, 20), frames = 1 + uniform_index(rng, 10);
    const Tensor v = random_tensor({2 * half, frames}, rng);
    const Tensor f = channel_flip(v, half);
    CHECK(channel_flip(f, half) == v);
    auto a = rows_of(v), b = rows_of(f);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("zero parameters give weights of one half") {
  ParameterStore store;
  SpectralAttention att(AttentionConfig{3, 4, 0.2}, store);
  Rng rng(4);
  Graph g;
  const Tensor w = att.scores(g, g.constant(random_tensor({6, 5}, rng))).value();
  CHECK(w == Tensor({5}, 0.5));
}

TEST_CASE("one weight per frame, strictly inside (0, 1)") {
  Fixture f(3);
  Rng rng(5);
  Graph g;
  Tensor v = random_tensor({6, 5}, rng);
  CHECK(f.att.scores(g, g.constant(v)).shape() == Shape{5});
  for (double& x : v.data()) x *= 1e6;
  for (double w : f.att.scores(g, g.constant(v)).value().data()) {
    CHECK(w > 0.0);
    CHECK(w < 1.0);
  }
}

TEST_CASE("scorer and projection are registered once for both branches") {
  Fixture f(4);
  CHECK(f.store.size() == 6);
  CHECK(f.store.count_with_prefix("attention.fc") == 4);
  CHECK(f.store.count_with_prefix("attention.proj") == 2);
}

TEST_CASE("projection of weighted frames") {
  Fixture f(3, 6);
  Rng rng(7);
  const Tensor v = random_tensor({6, 4}, rng);
  Graph g;
  f.store.get("attention.proj.bias").value.fill(0.0);
  const Tensor zero = f.att.attend_project(g, g.constant(v), g.constant(Tensor({4}, 0.0))).value();
  CHECK(zero == Tensor({3, 4}, 0.0));

  f.store.get("attention.proj.bias").value = random_tensor({3}, rng);
  Graph fresh;
  const Tensor ones = f.att.attend_project(fresh, fresh.constant(v), fresh.constant(Tensor({4}, 1.0))).value();
  const Tensor& pw = f.store.get("attention.proj.weight").value;
  const Tensor& pb = f.store.get("attention.proj.bias").value;
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::size_t t = 0; t < 4; ++t) {
      double z = pb[d];
      for (std::size_t c = 0; c < 6; ++c) z += pw.at(c, d) * v.at(c, t);
      const double expected = z > 0.0 ? z : 0.2 * z;
      CHECK(ones.at(d, t) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(f.att.attend_project(g, g.constant(v), g.constant(Tensor({3}, 1.0))), std::invalid_argument);
}

TEST_CASE("reference size: 514 x 297 attends to 257 x 297") {
  Fixture f(257, 8, 64);
  Rng rng(9);
  Graph g;
  auto b = f.att.forward(g, g.constant(random_tensor({514, 297}, rng)));
  for (int k = 0; k < 2; ++k) {
    CHECK(b.weights[k].shape() == Shape{297});
    CHECK(b.attended[k].shape() == Shape{257, 297});
  }
}

TEST_CASE("flipping the latent swaps the two branches exactly") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t half = 1 + uniform_index(rng, 12), frames = 1 + uniform_index(rng, 9);
    Fixture f(half, trial);
    const Tensor v = random_tensor({2 * half, frames}, rng);
    Graph g;
    auto plain = f.att.forward(g, g.constant(v));
    auto flipped = f.att.forward(g, g.constant(channel_flip(v, half)));
    CHECK(flipped.attended[0].value() == plain.attended[1].value());
    CHECK(flipped.attended[1].value() == plain.attended[0].value());
    CHECK(flipped.weights[0].value() == plain.weights[1].value());
  }
}

TEST_CASE("attention export") {
  auto dir = testing::scratch_dir("attention");
  export_attention({0.5, 0.5, 0.5}, dir / "w.txt");
  std::ifstream in(dir / "w.txt");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "0.5\n0.5\n0.5\n");

  Rng rng(11);
  std::vector<double> w(37);
  for (double& x : w) x = uniform01(rng);
  export_attention(w, dir / "r.txt");
  const auto back = read_attention(dir / "r.txt");
  REQUIRE(back.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(back[i] - w[i]) < 1e-9);

  export_attention({}, dir / "empty.txt");
  CHECK(std::filesystem::file_size(dir / "empty.txt") == 0);
  CHECK(read_attention(dir / "empty.txt").empty());
}

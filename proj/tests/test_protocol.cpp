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
#include <fstream>
#include <set>

#include "doctest.h"
#include "mirnet/eval/protocol.hpp"
#include "testing.hpp"

using namespace mirnet;
using namespace mirnet::eval;

namespace {

SpeakerPool make_pool(std::size_t speakers, std::size_t utterances) {
  SpeakerPool pool;
  for (std::size_t s = 0; s < speakers; ++s) {
    const std::string name = "s" + std::to_string(s);
    for (std::size_t u = 0; u < utterances; ++u) pool[name].push_back(name + "/u" + std::to_string(u) + ".wav");
  }
  return pool;
}

std::vector<double> random_scores(Rng& rng, std::size_t n, double shift) {
  std::vector<double> v(n);
  // Coarse grid so that ties happen often.
  for (double& x : v) x = std::round(uniform(rng, 0.0, 10.0) + shift) / 4.0;
  return v;
}

}  // namespace

TEST_CASE("euclidean distance") {
  CHECK(euclidean({0, 0}, {3, 4}) == 5.0);
  CHECK_THROWS_AS(euclidean({0, 0}, {1}), std::invalid_argument);
}

TEST_CASE("closest cross pair") {
  IdentityPair a{Embedding{0, 0}, Embedding{1, 1}};
  IdentityPair b{Embedding{0, 0.1}, Embedding{5, 5}};
  CHECK(min_pair_distance(a, a) == 0.0);
  CHECK(min_pair_distance(a, b) == doctest::Approx(0.1).epsilon(1e-15));
  IdentityPair a_sw{a[1], a[0]}, b_sw{b[1], b[0]};
  CHECK(min_pair_distance(a_sw, b) == min_pair_distance(a, b));
  CHECK(min_pair_distance(a, b_sw) == min_pair_distance(a, b));

  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    IdentityPair x, y;
    for (auto* p : {&x, &y}) {
      for (auto& e : *p) {
        e.resize(5);
        for (double& v : e) v = uniform(rng, -3.0, 3.0);
      }
    }
    CHECK(min_pair_distance(x, y) == min_pair_distance(y, x));
    double brute = 1e300;
    for (const auto& e : x) {
      for (const auto& f : y) {
        double s = 0.0;
        for (std::size_t i = 0; i < 5; ++i) s += (e[i] - f[i]) * (e[i] - f[i]);
        brute = std::min(brute, std::sqrt(s));
      }
    }
    CHECK(min_pair_distance(x, y) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("identity label decision") {
  IdentityPair a{Embedding{0, 0}, Embedding{4, 1}};
  CHECK(decide_identity_labels(a, a).mapping == std::vector<std::size_t>{0, 1});
  IdentityPair swapped{a[1], a[0]};
  CHECK(decide_identity_labels(a, swapped).mapping == std::vector<std::size_t>{1, 0});

  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    IdentityPair x, y;
    for (auto* p : {&x, &y}) {
      for (auto& e : *p) e = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    }
    const double keep = euclidean(x[0], y[0]) + euclidean(x[1], y[1]);
    const double swap = euclidean(x[0], y[1]) + euclidean(x[1], y[0]);
    auto d = decide_identity_labels(x, y);
    CHECK(d.mapping == (swap < keep ? std::vector<std::size_t>{1, 0} : std::vector<std::size_t>{0, 1}));
    CHECK(d.cost == doctest::Approx(std::min(keep, swap)).epsilon(1e-14));
  }
}

TEST_CASE("minimum corpus yields one valid trial") {
  Rng rng(3);
  auto trials = build_trials(make_pool(4, 2), 1, rng);
  REQUIRE(trials.size() == 1);
  CHECK(audit_trial(trials[0]).empty());
}

TEST_CASE("too few eligible speakers") {
  Rng rng(4);
  SpeakerPool pool = make_pool(3, 5);
  pool["lonely"] = {"lonely/u0.wav"};
  CHECK_THROWS_WITH_AS(build_trials(pool, 5, rng), doctest::Contains("4"), std::invalid_argument);
}

TEST_CASE("ten thousand trials pass the overlap audit") {
  Rng rng(5);
  SpeakerPool pool = make_pool(6, 3);
  pool["short"] = {"short/only.wav"};
  auto trials = build_trials(pool, 10000, rng);
  REQUIRE(trials.size() == 10000);
  std::size_t violations = 0;
  for (const Trial& t : trials) {
    if (!audit_trial(t).empty()) ++violations;
    // Independent restatement of the construction.
    std::set<std::string> spk{t.anchor.speakers[0], t.anchor.speakers[1], t.negative.speakers[1],
                              t.positive.speakers[1]};
    if (spk.size() != 4) ++violations;
    if (t.positive.speakers[0] != t.anchor.speakers[0]) ++violations;
    if (t.positive.utterances[0] == t.anchor.utterances[0]) ++violations;
    if (t.negative.speakers[0] != t.positive.speakers[1]) ++violations;
    if (t.negative.utterances[0] == t.positive.utterances[1]) ++violations;
    if (t.anchor.speakers[0] == "short" || t.anchor.speakers[1] == "short") ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("audit catches a broken trial") {
  Rng rng(6);
  Trial t = build_trials(make_pool(4, 2), 1, rng)[0];
  Trial same_utt = t;
  same_utt.positive.utterances[0] = t.anchor.utterances[0];
  CHECK_FALSE(audit_trial(same_utt).empty());
  Trial overlap = t;
  overlap.negative.speakers[1] = t.anchor.speakers[1];
  CHECK_FALSE(audit_trial(overlap).empty());
}

TEST_CASE("trial lists are seeded") {
  Rng a(7), b(7);
  auto x = build_trials(make_pool(5, 3), 50, a);
  auto y = build_trials(make_pool(5, 3), 50, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].anchor.utterances == y[i].anchor.utterances);
    CHECK(x[i].negative.utterances == y[i].negative.utterances);
    CHECK(x[i].positive.seed == y[i].positive.seed);
  }
}

TEST_CASE("eer examples") {
  CHECK(compute_eer({0.1, 0.2, 0.3}, {0.6, 0.7, 0.8}).eer == 0.0);
  CHECK(compute_eer({0.1, 0.6}, {0.2, 0.7}).eer == 0.5);
  CHECK(compute_eer({0.3, 0.1, 0.3, 0.9}, {0.9, 0.3, 0.1, 0.3}).eer == 0.5);
  CHECK(compute_eer({1.0}, {1.0}).eer == 0.5);
  CHECK(compute_eer({0.8, 0.9}, {0.1, 0.2}).eer == 1.0);
  auto r = compute_eer({0.1, 0.2}, {0.3, 0.4, 0.5});
  CHECK(r.num_positive == 2);
  CHECK(r.num_negative == 3);
  CHECK_THROWS_AS(compute_eer({}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(compute_eer({0.1}, {NAN}), std::invalid_argument);
}

TEST_CASE("eer matches the brute-force sweep") {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t np = 1 + uniform_index(rng, 1000), nn = 1 + uniform_index(rng, 1000);
    const auto pos = random_scores(rng, np, 0.0);
    const auto neg = random_scores(rng, nn, uniform(rng, -2.0, 6.0));
    CHECK(std::abs(compute_eer(pos, neg).eer - testing::eer_oracle(pos, neg)) < 1e-9);
  }
}

TEST_CASE("eer depends only on the ordering of distances") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pos = random_scores(rng, 1 + uniform_index(rng, 200), 0.0);
    const auto neg = random_scores(rng, 1 + uniform_index(rng, 200), 2.0);
    auto warp = [](std::vector<double> v) {
      for (double& x : v) x = std::exp(x) + x * x * x;
      return v;
    };
    CHECK(compute_eer(pos, neg).eer == compute_eer(warp(pos), warp(neg)).eer);
  }
}

TEST_CASE("trial export format") {
  Rng rng(10);
  auto trials = build_trials(make_pool(4, 2), 2, rng);
  trials[0].d_p = 0.25;
  trials[0].d_n = 1.0 / 3.0;
  auto dir = testing::scratch_dir("trials");
  export_trials(trials, dir / "t.tsv");
  std::ifstream in(dir / "t.tsv");
  std::string line;
  std::getline(in, line);
  const Trial& t = trials[0];
  const std::string expected = t.anchor.utterances[0] + "+" + t.anchor.utterances[1] + "\t" +
                               t.positive.utterances[0] + "+" + t.positive.utterances[1] + "\t" +
                               t.negative.utterances[0] + "+" + t.negative.utterances[1] +
                               "\t0.25\t0.33333333333333331";
  CHECK(line == expected);
  std::size_t lines = 1;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 2);
}

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

#include "mirnet/eval/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mirnet::eval {

double euclidean(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double min_pair_distance(const IdentityPair& a, const IdentityPair& b) {
  double best = euclidean(a[0], b[0]);
  best = std::min(best, euclidean(a[0], b[1]));
  best = std::min(best, euclidean(a[1], b[0]));
  best = std::min(best, euclidean(a[1], b[1]));
  return best;
}

pit::Assignment decide_identity_labels(const IdentityPair& anchor, const IdentityPair& reference) {
  std::vector<double> cost(4);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) cost[i * 2 + j] = euclidean(anchor[i], reference[j]);
  }
  return pit::assign(cost, 2);
}

namespace {

const std::string& pick(const std::vector<std::string>& v, Rng& rng) { return v[uniform_index(rng, v.size())]; }

const std::string& pick_other(const std::vector<std::string>& v, const std::string& avoid, Rng& rng) {
  // Callers guarantee at least two utterances, so at most one index is excluded.
  std::size_t i = uniform_index(rng, v.size() - 1);
  if (v[i] == avoid) i = v.size() - 1;
  return v[i];
}

}  // namespace

std::vector<Trial> build_trials(const SpeakerPool& pool, std::size_t count, Rng& rng) {
  std::vector<std::string> eligible;
  for (const auto& [speaker, utts] : pool) {
    if (utts.size() >= 2) eligible.push_back(speaker);
  }
  if (eligible.size() < 4) {
    throw std::invalid_argument("build_trials: need at least 4 speakers with 2 or more utterances, found " +
                                std::to_string(eligible.size()) + " (shortfall " +
                                std::to_string(4 - eligible.size()) + ")");
  }
  std::vector<Trial> trials;
  trials.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    // Partial Fisher-Yates: the first four entries become A, B, C, D.
    for (std::size_t i = 0; i < 4; ++i) {
      std::swap(eligible[i], eligible[i + uniform_index(rng, eligible.size() - i)]);
    }
    const std::string& a = eligible[0];
    const std::string& b = eligible[1];
    const std::string& c = eligible[2];
    const std::string& d = eligible[3];
    const auto& ua = pool.at(a);
    const auto& uc = pool.at(c);
    Trial t;
    t.anchor.speakers = {a, b};
    t.anchor.utterances = {pick(ua, rng), pick(pool.at(b), rng)};
    t.positive.speakers = {a, c};
    t.positive.utterances = {pick_other(ua, t.anchor.utterances[0], rng), pick(uc, rng)};
    t.negative.speakers = {c, d};
    t.negative.utterances = {pick_other(uc, t.positive.utterances[1], rng), pick(pool.at(d), rng)};
    t.anchor.seed = rng();
    t.positive.seed = rng();
    t.negative.seed = rng();
    trials.push_back(std::move(t));
  }
  return trials;
}

std::string audit_trial(const Trial& t) {
  const auto& an = t.anchor.speakers;
  const auto& po = t.positive.speakers;
  const auto& ne = t.negative.speakers;
  for (const MixtureRef* m : {&t.anchor, &t.positive, &t.negative}) {
    if (m->speakers[0] == m->speakers[1]) return "mixture of a single speaker " + m->speakers[0];
  }
  for (const auto& s : ne) {
    if (s == an[0] || s == an[1]) return "negative shares speaker " + s + " with the anchor";
  }
  std::size_t shared = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      if (an[i] != po[j]) continue;
      ++shared;
      if (t.anchor.utterances[i] == t.positive.utterances[j]) {
        return "positive reuses anchor utterance " + t.anchor.utterances[i];
      }
    }
  }
  if (shared != 1) return "anchor and positive share " + std::to_string(shared) + " speakers";
  return {};
}

EERResult compute_eer(const std::vector<double>& positive, const std::vector<double>& negative) {
  if (positive.empty() || negative.empty()) {
    throw std::invalid_argument("compute_eer: need at least one positive and one negative score");
  }
  auto finite = [](double d) { return std::isfinite(d); };
  if (!std::all_of(positive.begin(), positive.end(), finite) ||
      !std::all_of(negative.begin(), negative.end(), finite)) {
    throw std::invalid_argument("compute_eer: distances must be finite");
  }
  std::vector<double> pos = positive, neg = negative;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<double> thresholds;
  thresholds.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  // Counts at the previous operating point: accepted negatives and rejected positives.
  std::size_t fa_prev = 0, fr_prev = pos.size();
  double t_prev = thresholds.front();
  std::size_t ip = 0, in = 0;
  EERResult r;
  r.num_positive = pos.size();
  r.num_negative = neg.size();
  for (double t : thresholds) {
    while (ip < pos.size() && pos[ip] <= t) ++ip;
    while (in < neg.size() && neg[in] <= t) ++in;
    const std::size_t fa = in, fr = pos.size() - ip;
    // FAR - FRR >= 0, compared exactly on integers.
    if (static_cast<double>(fa) * np >= static_cast<double>(fr) * nn) {
      const double a = static_cast<double>(fa_prev), b = static_cast<double>(fa);
      const double c = static_cast<double>(fr_prev), d = static_cast<double>(fr);
      const double den = (b - a) * np + (c - d) * nn;
      r.eer = (b * c - a * d) / den;
      const double alpha = (c * nn - a * np) / den;
      r.threshold = t_prev + alpha * (t - t_prev);
      return r;
    }
    fa_prev = fa;
    fr_prev = fr;
    t_prev = t;
  }
  // Unreachable: at the largest threshold every negative is accepted.
  throw std::logic_error("compute_eer: no crossing found");
}

void export_trials(const std::vector<Trial>& trials, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  char buf[96];
  for (const Trial& t : trials) {
    out << t.anchor.utterances[0] << '+' << t.anchor.utterances[1] << '\t' << t.positive.utterances[0] << '+'
        << t.positive.utterances[1] << '\t' << t.negative.utterances[0] << '+' << t.negative.utterances[1];
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\n", t.d_p, t.d_n);
    out << buf;
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace mirnet::eval

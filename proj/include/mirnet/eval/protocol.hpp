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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mirnet/pit/pit.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::eval {

using Embedding = std::vector<double>;
/// The two identity vectors extracted from one mixture.
using IdentityPair = std::array<Embedding, 2>;

double euclidean(const Embedding& a, const Embedding& b);

/// min over i, j of d(a[i], b[j]).
double min_pair_distance(const IdentityPair& a, const IdentityPair& b);

/// Maps the anchor's slots onto the reference's slots by the cheaper of the two
/// bijections of the 2 x 2 Euclidean cost matrix.
pit::Assignment decide_identity_labels(const IdentityPair& anchor, const IdentityPair& reference);

/// Speaker name -> utterance keys.
using SpeakerPool = std::map<std::string, std::vector<std::string>>;

struct MixtureRef {
  std::array<std::string, 2> speakers;
  std::array<std::string, 2> utterances;
  std::uint64_t seed = 0;  // drives segment offsets when the mixture is rendered
};

/// Anchor A+B, positive A'+C, negative C'+D, where A' and C' are other
/// utterances of A and C and {A, B, C, D} are four distinct speakers.
struct Trial {
  MixtureRef anchor;
  MixtureRef positive;
  MixtureRef negative;
  double d_p = 0.0;
  double d_n = 0.0;
};

/// Draws `count` trials. Only speakers with at least two utterances take part,
/// and at least four of them are needed.
std::vector<Trial> build_trials(const SpeakerPool& pool, std::size_t count, Rng& rng);

/// Empty string when the trial is well formed, otherwise what is wrong with it.
std::string audit_trial(const Trial& t);

struct EERResult {
  double eer = 0.0;
  double threshold = 0.0;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
};

/// Equal error rate of distance scores: a positive is rejected when d > t, a
/// negative accepted when d <= t. Thresholds sweep the sorted distinct
/// distances, starting from a point below all of them (FAR 0, FRR 1), and the
/// crossing is interpolated linearly between the two bracketing points.
EERResult compute_eer(const std::vector<double>& positive, const std::vector<double>& negative);

/// One trial per line: anchor, positive and negative utterances (each pair
/// joined by '+'), then d_p and d_n, tab separated.
void export_trials(const std::vector<Trial>& trials, const std::filesystem::path& path);

}  // namespace mirnet::eval

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
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirnet/frontend/wav.hpp"

namespace mirnet::harness {

inline const std::vector<std::string> kSplits{"train", "val", "eval_seen", "eval_unseen"};

/// A corpus laid out as DIR/<speaker>/<utterance>.wav. Utterances are keyed
/// by their path relative to DIR ("spk/utt.wav"). Split manifests DIR/<split>.lst
/// list one key per line; when none exist, each speaker's sorted utterances
/// are split 60/20/20 into train, val and eval_seen.
struct CorpusIndex {
  std::filesystem::path root;
  std::map<std::string, std::vector<std::string>> speakers;  // speaker -> keys
  std::map<std::string, std::string> speaker_of;             // key -> speaker
  std::map<std::string, std::vector<std::string>> splits;    // split -> keys

  /// Speakers with at least one training utterance, sorted; the position is the class label.
  std::vector<std::string> train_speakers() const;
  /// Utterances of `split` grouped by speaker.
  std::map<std::string, std::vector<std::string>> pool(const std::string& split) const;
  std::filesystem::path path(const std::string& key) const { return root / key; }
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& what, std::vector<std::string> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

/// Scans and validates the whole corpus. Every file that fails to load as
/// 16 kHz mono PCM-16, every manifest entry that does not exist and every
/// unseen speaker that also appears in training is collected; if any were
/// found a CorpusError listing all of them is thrown.
CorpusIndex index_corpus(const std::filesystem::path& root);

struct SynthCorpusSpec {
  std::size_t seen_speakers = 8;
  std::size_t unseen_speakers = 4;
  std::size_t utterances = 20;
  double seconds = 2.0;
  std::uint64_t seed = 0;
};

/// Writes synthetic speakers spk000, spk001, ... and the four manifests.
/// Seen speakers split their utterances 60/20/20 into train, val and
/// eval_seen; unseen speakers go entirely to eval_unseen.
void write_synthetic_corpus(const std::filesystem::path& root, const SynthCorpusSpec& spec);

}  // namespace mirnet::harness

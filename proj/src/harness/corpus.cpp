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

#include "mirnet/harness/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "mirnet/frontend/synth.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::harness {

namespace fs = std::filesystem;

std::vector<std::string> CorpusIndex::train_speakers() const {
  std::set<std::string> s;
  if (auto it = splits.find("train"); it != splits.end()) {
    for (const auto& k : it->second) s.insert(speaker_of.at(k));
  }
  return {s.begin(), s.end()};
}

std::map<std::string, std::vector<std::string>> CorpusIndex::pool(const std::string& split) const {
  std::map<std::string, std::vector<std::string>> out;
  if (auto it = splits.find(split); it != splits.end()) {
    for (const auto& k : it->second) out[speaker_of.at(k)].push_back(k);
  }
  return out;
}

namespace {

void default_splits(CorpusIndex& idx) {
  for (const auto& [speaker, keys] : idx.speakers) {
    const std::size_t n = keys.size();
    const auto n_train = static_cast<std::size_t>(std::lround(0.6 * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
      const char* split = i < n_train ? "train" : i < n_train + n_val ? "val" : "eval_seen";
      idx.splits[split].push_back(keys[i]);
    }
  }
}

}  // namespace

CorpusIndex index_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw CorpusError("data directory '" + root.string() + "' does not exist", {root.string() + ": missing"});
  }
  CorpusIndex idx;
  idx.root = root;
  std::vector<std::string> failures;

  std::vector<fs::path> speaker_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) speaker_dirs.push_back(e.path());
  }
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  for (const auto& dir : speaker_dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    const std::string speaker = dir.filename().string();
    for (const auto& f : files) {
      const std::string key = speaker + "/" + f.filename().string();
      try {
        (void)frontend::load_wav(f);
      } catch (const std::exception& e) {
        failures.push_back(key + ": " + e.what());
        continue;
      }
      idx.speakers[speaker].push_back(key);
      idx.speaker_of[key] = speaker;
    }
  }

  bool any_manifest = false;
  for (const auto& split : kSplits) {
    const fs::path manifest = root / (split + ".lst");
    if (!fs::exists(manifest)) continue;
    any_manifest = true;
    std::ifstream in(manifest);
    std::string line;
    auto& keys = idx.splits[split];
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (!idx.speaker_of.count(line)) {
        failures.push_back(split + ".lst: '" + line + "' is not a valid utterance in the corpus");
        continue;
      }
      keys.push_back(line);
    }
  }
  if (!any_manifest) default_splits(idx);

  const auto train = idx.train_speakers();
  const std::set<std::string> train_set(train.begin(), train.end());
  std::set<std::string> reported;
  for (const auto& [speaker, keys] : idx.pool("eval_unseen")) {
    if (train_set.count(speaker) && reported.insert(speaker).second) {
      failures.push_back("eval_unseen speaker '" + speaker + "' also appears in train");
    }
  }
  if (!failures.empty()) {
    std::string msg = "corpus '" + root.string() + "' has " + std::to_string(failures.size()) + " problem(s):";
    for (const auto& f : failures) msg += "\n  " + f;
    throw CorpusError(msg, failures);
  }
  return idx;
}

void write_synthetic_corpus(const fs::path& root, const SynthCorpusSpec& spec) {
  fs::create_directories(root);
  std::map<std::string, std::vector<std::string>> manifests;
  const std::size_t total = spec.seen_speakers + spec.unseen_speakers;
  const auto n_train = static_cast<std::size_t>(std::lround(0.6 * static_cast<double>(spec.utterances)));
  const auto n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(spec.utterances)));
  for (std::size_t s = 0; s < total; ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "spk%03zu", s);
    fs::create_directories(root / name);
    const bool seen = s < spec.seen_speakers;
    for (std::size_t u = 0; u < spec.utterances; ++u) {
      char file[32];
      std::snprintf(file, sizeof file, "utt%03zu.wav", u);
      Rng rng(derive_seed(spec.seed, s, u));
      auto wave = frontend::synth_speaker(static_cast<int>(s), spec.seconds, rng);
      const std::string key = std::string(name) + "/" + file;
      frontend::save_wav(wave, root / key);
      const char* split = !seen ? "eval_unseen" : u < n_train ? "train" : u < n_train + n_val ? "val" : "eval_seen";
      manifests[split].push_back(key);
    }
  }
  for (const auto& split : kSplits) {
    std::ofstream out(root / (split + ".lst"));
    for (const auto& k : manifests[split]) out << k << '\n';
    if (!out) throw std::runtime_error((root / (split + ".lst")).string() + ": write failed");
  }
}

}  // namespace mirnet::harness

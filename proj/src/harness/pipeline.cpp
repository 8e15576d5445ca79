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

#include "mirnet/harness/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "mirnet/train/trainer.hpp"

namespace mirnet::harness {

using numerics::Graph;

LoadedModel load_model(const std::filesystem::path& ckpt_path, const std::optional<RunConfig>& override_config) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  LoadedModel m;
  m.config = override_config ? *override_config : parse_config(ckpt.config_text);
  if (m.config.model.num_classes == 0) {
    // A config without a class count can only describe the checkpoint's own classifier.
    m.config.model.num_classes = parse_config(ckpt.config_text).model.num_classes;
  }
  m.net = std::make_unique<model::SpeakerNet>(m.config.model);
  apply_checkpoint(ckpt, m.net->parameters());
  return m;
}

Extraction extract(const model::SpeakerNet& net, const numerics::Tensor& features) {
  Graph g;
  const auto r = net.forward(g, g.constant(features));
  Extraction e;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto id = r.identities[k].value().data();
    e.identities[k].assign(id.begin(), id.end());
    const auto w = r.weights[k].value().data();
    e.attention[k].assign(w.begin(), w.end());
  }
  return e;
}

const frontend::Waveform& WaveCache::get(const std::string& key) {
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, frontend::load_wav(index_.path(key))).first;
  return it->second;
}

train::TrainData load_training_data(const CorpusIndex& index, WaveCache& cache) {
  const auto speakers = index.train_speakers();
  if (speakers.size() < 2) {
    throw std::invalid_argument("training needs at least 2 speakers in the train split, found " +
                                std::to_string(speakers.size()));
  }
  auto label = [&](const std::string& key) -> std::optional<std::size_t> {
    const auto it = std::lower_bound(speakers.begin(), speakers.end(), index.speaker_of.at(key));
    if (it == speakers.end() || *it != index.speaker_of.at(key)) return std::nullopt;
    return static_cast<std::size_t>(it - speakers.begin());
  };
  train::TrainData data;
  for (const auto& [split, dest] : {std::pair{"train", &data.train}, std::pair{"val", &data.val}}) {
    const auto it = index.splits.find(split);
    if (it == index.splits.end()) continue;
    for (const auto& key : it->second) {
      const auto l = label(key);
      if (!l) {
        throw std::invalid_argument(std::string(split) + " utterance '" + key + "' belongs to a speaker without training data");
      }
      frontend::Waveform w = cache.get(key);
      w.speaker_id = static_cast<int>(*l);
      dest->push_back({std::move(w), *l});
    }
  }
  if (data.val.empty()) throw std::invalid_argument("the corpus has no validation utterances");
  return data;
}

void score_trials(const model::SpeakerNet& net, WaveCache& cache, std::vector<eval::Trial>& trials) {
  struct Job {
    const frontend::Waveform* a;
    const frontend::Waveform* b;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& t : trials) {
    for (const auto* m : {&t.anchor, &t.positive, &t.negative}) {
      jobs.push_back({&cache.get(m->utterances[0]), &cache.get(m->utterances[1]), m->seed});
    }
  }
  std::vector<eval::IdentityPair> ids(jobs.size());
  // Each mixture is rendered and embedded independently of the others.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto rendered = train::render_mixture(*jobs[i].a, *jobs[i].b, jobs[i].seed, net.config());
    ids[i] = extract(net, rendered.features).identities;
  }
  for (std::size_t t = 0; t < trials.size(); ++t) {
    trials[t].d_p = eval::min_pair_distance(ids[3 * t], ids[3 * t + 1]);
    trials[t].d_n = eval::min_pair_distance(ids[3 * t], ids[3 * t + 2]);
  }
}

namespace {

eval::EERResult eer_of(const std::vector<eval::Trial>& trials) {
  std::vector<double> pos, neg;
  for (const auto& t : trials) {
    pos.push_back(t.d_p);
    neg.push_back(t.d_n);
  }
  return eval::compute_eer(pos, neg);
}

}  // namespace

EerRun evaluate_eer(const model::SpeakerNet& net, const CorpusIndex& index, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("eval-eer: --trials must be positive");
  WaveCache cache(index);
  EerRun run;
  const auto train = index.train_speakers();
  const std::set<std::string> train_set(train.begin(), train.end());
  eval::SpeakerPool seen;
  for (auto& [speaker, keys] : index.pool("eval_seen")) {
    if (train_set.count(speaker)) seen[speaker] = keys;
  }
  Rng seen_rng(derive_seed(seed, 0x7365656e));
  try {
    run.seen = eval::build_trials(seen, count, seen_rng);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("seen speakers: ") + e.what());
  }
  score_trials(net, cache, run.seen);
  run.seen_eer = eer_of(run.seen);

  const auto unseen = index.pool("eval_unseen");
  if (!unseen.empty()) {
    Rng unseen_rng(derive_seed(seed, 0x756e7365656e));
    try {
      run.unseen = eval::build_trials(unseen, count, unseen_rng);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("unseen speakers: ") + e.what());
    }
    score_trials(net, cache, run.unseen);
    run.unseen_eer = eer_of(run.unseen);
  }
  return run;
}

std::string format_eer_line(const EerRun& run) {
  char buf[128];
  if (run.unseen_eer) {
    std::snprintf(buf, sizeof buf, "seen_eer=%.2f unseen_eer=%.2f trials=%zu", 100.0 * run.seen_eer.eer,
                  100.0 * run.unseen_eer->eer, run.seen.size());
  } else {
    std::snprintf(buf, sizeof buf, "seen_eer=%.2f unseen_eer=n/a trials=%zu", 100.0 * run.seen_eer.eer,
                  run.seen.size());
  }
  return buf;
}

}  // namespace mirnet::harness

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

#include "mirnet/harness/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "mirnet/frontend/audio.hpp"
#include "mirnet/harness/checkpoint.hpp"
#include "mirnet/harness/config.hpp"
#include "mirnet/harness/corpus.hpp"
#include "mirnet/harness/gradcheck_suite.hpp"
#include "mirnet/harness/pipeline.hpp"
#include "mirnet/model/attention.hpp"
#include "mirnet/numerics/kernels.hpp"
#include "mirnet/train/trainer.hpp"

namespace mirnet::harness {
namespace fs = std::filesystem;
namespace {

constexpr const char* kSynthMarker = ".mirnet-synth";

int run_mix(const std::string& a_path, const std::string& b_path, const std::string& out_path, std::uint64_t seed,
            std::ostream& out) {
  const auto a = frontend::load_wav(a_path);
  const auto b = frontend::load_wav(b_path);
  // Both sources are cut to the shorter length at seeded offsets.
  const std::size_t len = std::min(a.samples.size(), b.samples.size());
  const double seconds = static_cast<double>(len) / a.sample_rate;
  Rng rng(seed);
  const auto seg_a = frontend::sample_segment(a, seconds, rng);
  const auto seg_b = frontend::sample_segment(b, seconds, rng);
  auto m = frontend::mix(seg_a.wave, seg_b.wave);
  frontend::save_wav(m.mixture, out_path);
  out << "offset_a=" << seg_a.offset << " offset_b=" << seg_b.offset << "\n";
  return 0;
}

// Generates the synthetic corpus unless an identical one is already there.
void ensure_synthetic(const fs::path& dir, std::size_t speakers, std::ostream& out) {
  SynthCorpusSpec spec;
  spec.seen_speakers = speakers;
  const std::string tag = "seen=" + std::to_string(spec.seen_speakers) + " unseen=" +
                          std::to_string(spec.unseen_speakers) + " utterances=" + std::to_string(spec.utterances) +
                          " seconds=" + std::to_string(spec.seconds) + " seed=" + std::to_string(spec.seed) + "\n";
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    std::ifstream in(dir / kSynthMarker);
    std::string existing((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (existing == tag) return;
    throw std::runtime_error("--synth: '" + dir.string() +
                             "' is not empty and does not hold this synthetic corpus; refusing to overwrite");
  }
  write_synthetic_corpus(dir, spec);
  std::ofstream(dir / kSynthMarker) << tag;
  out << "synthesised " << speakers << " training speakers and " << spec.unseen_speakers << " unseen speakers in "
      << dir.string() << "\n";
}

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::string log;
  std::size_t synth = 0;
  std::vector<std::string> overrides;
};

int run_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  for (const auto& o : a.overrides) apply_override(cfg, o);
  if (a.synth > 0) ensure_synthetic(a.data, a.synth, out);
  const CorpusIndex index = index_corpus(a.data);
  const std::size_t classes = index.train_speakers().size();
  if (cfg.model.num_classes == 0) {
    cfg.model.num_classes = classes;
  } else if (cfg.model.num_classes != classes) {
    throw std::invalid_argument("config sets num_classes = " + std::to_string(cfg.model.num_classes) +
                                " but the corpus has " + std::to_string(classes) + " training speakers");
  }
  WaveCache cache(index);
  const auto data = load_training_data(index, cache);

  model::SpeakerNet net(cfg.model);
  net.init(cfg.train.seed);
  const std::string log_path = a.log.empty() ? a.out + ".log" : a.log;
  std::ofstream log(log_path);
  if (!log) throw std::runtime_error(log_path + ": cannot open training log");
  out << "training " << net.parameters().scalar_count() << " parameters on " << data.train.size()
      << " utterances of " << classes << " speakers\n";
  const auto report = train::train(net, data, cfg.train, [&](const train::EpochRecord& r) {
    const std::string line = train::format_epoch(r);
    log << line << '\n' << std::flush;
    out << line << '\n' << std::flush;
  });
  save_checkpoint(make_checkpoint(net.parameters(), serialize_config(cfg)), a.out);
  char buf[96];
  std::snprintf(buf, sizeof buf, "best epoch %zu, %.1f s\n", report.best_epoch, report.wall_seconds);
  out << buf;
  return 0;
}

struct EmbedArgs {
  std::string ckpt;
  std::string wav;
  std::string out;
  std::string config;
  std::string attention;
};

int run_embed(const EmbedArgs& a, std::ostream& out) {
  std::optional<RunConfig> override_cfg;
  if (!a.config.empty()) override_cfg = load_config(a.config);
  const auto m = load_model(a.ckpt, override_cfg);
  const auto wave = frontend::load_wav(a.wav);
  const auto e = extract(*m.net, model::features(wave, m.config.model));
  std::ofstream csv(a.out);
  if (!csv) throw std::runtime_error(a.out + ": cannot open for writing");
  const std::size_t dim = e.identities[0].size();
  csv << "utterance_id,slot";
  for (std::size_t i = 1; i <= dim; ++i) csv << ",e_" << i;
  csv << '\n';
  char buf[40];
  for (std::size_t k = 0; k < 2; ++k) {
    csv << wave.utterance_id << ',' << (k + 1);
    for (double v : e.identities[k]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      csv << buf;
    }
    csv << '\n';
  }
  if (!csv) throw std::runtime_error(a.out + ": write failed");
  if (!a.attention.empty()) {
    for (std::size_t k = 0; k < 2; ++k) {
      model::export_attention(e.attention[k], a.attention + "." + std::to_string(k + 1) + ".txt");
    }
  }
  out << "wrote 2 embeddings of dimension " << dim << " to " << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  const auto m = load_model(a.ckpt);
  const CorpusIndex index = index_corpus(a.data);
  const auto run = evaluate_eer(*m.net, index, a.trials, a.seed);
  std::vector<eval::Trial> all = run.seen;
  all.insert(all.end(), run.unseen.begin(), run.unseen.end());
  eval::export_trials(all, a.out.empty() ? a.ckpt + ".trials.tsv" : a.out);
  out << format_eer_line(run) << "\n";
  return 0;
}

int run_gradcheck(std::uint64_t seed, std::size_t per_param, std::ostream& out) {
  const auto report = run_gradcheck_suite(seed, per_param);
  char buf[256];
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%-28s max_rel_error=%.3e coords=%zu skipped=%zu worst=%s\n", c.name.c_str(),
                  c.result.max_rel_error, c.result.coordinates, c.result.skipped, c.result.worst.c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "max_rel_error=%.3e seconds=%.1f\n", report.max_rel_error, report.seconds);
  out << buf;
  return report.passed() ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  kernels::configure_threads_from_env();
  CLI::App app{"Multiple speaker embeddings from two-speaker mixtures", "mirnet"};
  app.require_subcommand(1);

  std::string mix_a, mix_b, mix_out;
  std::uint64_t mix_seed = 0;
  auto* mix = app.add_subcommand("mix", "Mix two utterances into one 16 kHz mono WAV");
  mix->add_option("--a", mix_a, "First source")->required();
  mix->add_option("--b", mix_b, "Second source")->required();
  mix->add_option("--out", mix_out, "Output WAV")->required();
  mix->add_option("--seed", mix_seed, "Seed for the segment offsets");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train on a corpus and write the best checkpoint");
  tr->add_option("--config", ta.config, "Config file (flat key = value)");
  tr->add_option("--data", ta.data, "Corpus directory")->required();
  tr->add_option("--out", ta.out, "Checkpoint to write")->required();
  tr->add_option("--log", ta.log, "Training log (default: <out>.log)");
  tr->add_option("--synth", ta.synth, "Generate a synthetic corpus with N training speakers into --data first");
  tr->add_option("--set", ta.overrides, "Override a config key: --set key=value");

  EmbedArgs ea;
  auto* em = app.add_subcommand("embed", "Export both speaker embeddings of a mixture as CSV");
  em->add_option("--ckpt", ea.ckpt, "Checkpoint")->required();
  em->add_option("--wav", ea.wav, "Mixture WAV")->required();
  em->add_option("--out", ea.out, "CSV to write")->required();
  em->add_option("--config", ea.config, "Model config to use instead of the checkpoint's");
  em->add_option("--attention", ea.attention, "Also write attention weights to PREFIX.1.txt and PREFIX.2.txt");

  EvalArgs va;
  auto* ev = app.add_subcommand("eval-eer", "Mixture-pair verification EER on seen and unseen speakers");
  ev->add_option("--ckpt", va.ckpt, "Checkpoint")->required();
  ev->add_option("--data", va.data, "Corpus directory")->required();
  ev->add_option("--trials", va.trials, "Trials per scenario");
  ev->add_option("--seed", va.seed, "Trial seed");
  ev->add_option("--out", va.out, "Trial export (default: <ckpt>.trials.tsv)");

  std::uint64_t gc_seed = 0;
  std::size_t gc_per_param = 8;
  auto* gc = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  gc->add_option("--seed", gc_seed, "Seed for the random points");
  gc->add_option("--per-param", gc_per_param, "Coordinates checked per model parameter");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (*mix) return run_mix(mix_a, mix_b, mix_out, mix_seed, out);
    if (*tr) return run_train(ta, out);
    if (*em) return run_embed(ea, out);
    if (*ev) return run_eval(va, out);
    if (*gc) return run_gradcheck(gc_seed, gc_per_param, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mirnet::harness

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

// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mirnet/eval/protocol.hpp"
#include "mirnet/harness/checkpoint.hpp"
#include "mirnet/harness/cli.hpp"
#include "mirnet/harness/config.hpp"
#include "mirnet/harness/corpus.hpp"
#include "mirnet/harness/gradcheck_suite.hpp"
#include "mirnet/model/attention.hpp"
#include "mirnet/model/network.hpp"
#include "mirnet/numerics/ops.hpp"
#include "mirnet/pit/pit.hpp"
#include "testing.hpp"

using namespace mirnet;
namespace fs = std::filesystem;
using numerics::Graph;
using numerics::Tensor;
using numerics::Var;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome gradient_correctness() {
  const auto report = harness::run_gradcheck_suite(1);
  const bool fast = report.seconds < 120.0;
  return {report.passed() && fast, std::to_string(report.checks.size()) + " checks, max rel error " +
                                       fmt("%.2e", report.max_rel_error) + ", " + fmt("%.1f", report.seconds) +
                                       " s"};
}

Outcome pit_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(2);
  double worst = 0.0, worst_two = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4);
    const std::size_t classes = n + uniform_index(rng, 5);
    std::vector<std::vector<double>> logits(n, std::vector<double>(classes));
    for (auto& z : logits) {
      for (double& v : z) v = uniform(rng, -5.0, 5.0);
    }
    std::vector<std::size_t> pool(classes);
    for (std::size_t c = 0; c < classes; ++c) pool[c] = c;
    shuffle(pool, rng);
    const std::vector<std::size_t> labels(pool.begin(), pool.begin() + static_cast<long>(n));

    Graph g;
    std::vector<Var> vars;
    for (const auto& z : logits) vars.push_back(g.constant(Tensor::vector(z)));
    const double loss = pit::pit_loss(vars, labels).loss.value().item();
    worst = std::max(worst, std::abs(loss - testing::pit_oracle(logits, labels)));
    if (n == 2) {
      const double l1 = testing::cross_entropy_oracle(logits[0], labels[0]) +
                        testing::cross_entropy_oracle(logits[1], labels[1]);
      const double l2 = testing::cross_entropy_oracle(logits[0], labels[1]) +
                        testing::cross_entropy_oracle(logits[1], labels[0]);
      worst_two = std::max(worst_two, std::abs(loss - std::min(l1, l2)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-12 && worst_two < 1e-12 && secs < 30.0,
          "max deviation " + fmt("%.1e", worst) + " (two slots " + fmt("%.1e", worst_two) + "), " +
              fmt("%.2f", secs) + " s"};
}

model::ModelConfig swap_model() {
  model::ModelConfig c;
  c.stft.nfft = 64;
  c.stft.frame_ms = 4.0;
  c.stft.hop_ms = 2.0;
  c.segment_seconds = 0.05;
  c.encoder_scale = 32;
  c.attention_hidden = 16;
  c.backbone.widths = {4, 8};
  c.backbone.embed_dim = 8;
  c.num_classes = 5;
  return c;
}

Outcome attention_swap() {
  const auto cfg = swap_model();
  model::SpeakerNet net(cfg);
  const std::size_t half = cfg.bins();
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    net.init(static_cast<std::uint64_t>(trial));
    const Tensor latent = testing::random_tensor({2 * half, 4 + uniform_index(rng, 12)}, rng);
    Graph g;
    const auto plain = net.forward_from_latent(g, g.constant(latent));
    const auto flipped = net.forward_from_latent(g, g.constant(model::channel_flip(latent, half)));
    for (int k = 0; k < 2; ++k) {
      worst = std::max(worst, numerics::max_abs_diff(flipped.attended[k].value(), plain.attended[1 - k].value()));
      worst = std::max(worst,
                       numerics::max_abs_diff(flipped.identities[k].value(), plain.identities[1 - k].value()));
      worst = std::max(worst, numerics::max_abs_diff(flipped.logits[k].value(), plain.logits[1 - k].value()));
    }
  }
  return {worst < 1e-10, "100 latents, max deviation " + fmt("%.1e", worst)};
}

Outcome flip_involution() {
  Rng rng(4);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t half = 1 + uniform_index(rng, 40), frames = 1 + uniform_index(rng, 20);
    const Tensor v = testing::random_tensor({2 * half, frames}, rng);
    const Tensor f = model::channel_flip(v, half);
    if (!(model::channel_flip(f, half) == v)) ++failures;
    // Row r of the flip is row (r + D) mod 2D of the input.
    bool permuted = true;
    for (std::size_t r = 0; r < 2 * half && permuted; ++r) {
      for (std::size_t t = 0; t < frames; ++t) permuted = permuted && f.at(r, t) == v.at((r + half) % (2 * half), t);
    }
    if (!permuted) ++failures;
  }
  return {failures == 0, "1000 latents, " + std::to_string(failures) + " failures"};
}

Outcome eer_oracle() {
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t np = 1 + uniform_index(rng, 400), nn = 1 + uniform_index(rng, 400);
    const double shift = uniform(rng, -3.0, 6.0);
    const double grid = uniform01(rng) < 0.5 ? 4.0 : 1e6;  // coarse grids force ties
    std::vector<double> pos(np), neg(nn);
    for (double& x : pos) x = std::round(uniform(rng, 0.0, 10.0) * grid) / grid;
    for (double& x : neg) x = std::round((uniform(rng, 0.0, 10.0) + shift) * grid) / grid;
    worst = std::max(worst, std::abs(eval::compute_eer(pos, neg).eer - testing::eer_oracle(pos, neg)));
  }
  const double separated = eval::compute_eer({0.1, 0.2, 0.3}, {0.5, 0.9}).eer;
  std::vector<double> same(200);
  for (double& x : same) x = uniform(rng, 0.0, 1.0);
  const double identical = eval::compute_eer(same, same).eer;
  return {worst < 1e-9 && separated == 0.0 && identical == 0.5,
          "500 lists, max deviation " + fmt("%.1e", worst) + "; separated " + fmt("%g", separated) +
              ", identical " + fmt("%g", identical)};
}

Outcome shape_faithfulness() {
  model::ModelConfig c;  // encoder and attention as published
  c.num_classes = 8;
  model::SpeakerNet net(c);
  net.init(6);
  Rng rng(6);
  frontend::Waveform w;
  w.samples.resize(3 * 16000);
  for (double& s : w.samples) s = uniform(rng, -0.5, 0.5);
  const Tensor feats = model::features(w, c);
  Graph g;
  const auto r = net.forward(g, g.constant(feats));
  auto dims = [](const numerics::Shape& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
    return out;
  };
  const bool ok = feats.shape() == numerics::Shape{257, 297} && r.latent.shape() == numerics::Shape{514, 297} &&
                  r.attended[0].shape() == numerics::Shape{257, 297} &&
                  r.attended[1].shape() == numerics::Shape{257, 297} &&
                  frontend::frame_count(48000, c.stft) == 297;
  return {ok, "features " + dims(feats.shape()) + ", latent " + dims(r.latent.shape()) + ", attended " +
                  dims(r.attended[0].shape())};
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = harness::cli_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// One full desk-scale experiment: train, score the trained model, score an untrained one.
struct DeskRun {
  bool ok = false;
  std::string failure;
  std::string log;
  std::string trained_eer;
  std::string untrained_eer;
  double best_val_acc = 0.0;
  double trained_seen = 0.0;
  double untrained_seen = 0.0;
  double seconds = 0.0;
};

double seen_eer_percent(const std::string& line) {
  const auto at = line.find("seen_eer=");
  return at == std::string::npos ? NAN : std::stod(line.substr(at + 9));
}

DeskRun desk_run(const fs::path& work, const fs::path& config, const std::string& tag) {
  DeskRun d;
  const auto t0 = Clock::now();
  const fs::path data = work / "synth8";
  const fs::path ckpt = work / (tag + ".ckpt");
  const fs::path untrained = work / (tag + "-untrained.ckpt");

  const auto train = cli({"train", "--config", config.string(), "--synth", "8", "--data", data.string(), "--out",
                          ckpt.string()});
  std::cout << train.out << std::flush;
  if (train.code != 0) {
    d.failure = "train failed: " + train.err;
    return d;
  }
  d.log = testing::read_file(fs::path(ckpt.string() + ".log"));
  std::size_t best_epoch = 0;
  std::sscanf(train.out.substr(train.out.rfind("best epoch")).c_str(), "best epoch %zu", &best_epoch);
  std::istringstream lines(d.log);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t epoch = 0;
    double tl = 0, vl = 0, acc = 0;
    if (std::sscanf(line.c_str(), "%zu\t%lf\t%lf\t%lf", &epoch, &tl, &vl, &acc) == 4 && epoch == best_epoch) {
      d.best_val_acc = acc;
    }
  }

  const auto eval = cli({"eval-eer", "--ckpt", ckpt.string(), "--data", data.string(), "--trials", "200", "--seed",
                         "1"});
  if (eval.code != 0) {
    d.failure = "eval-eer failed: " + eval.err;
    return d;
  }
  d.trained_eer = eval.out;

  harness::RunConfig cfg = harness::load_config(config.string());
  cfg.model.num_classes = harness::index_corpus(data).train_speakers().size();
  model::SpeakerNet fresh(cfg.model);
  fresh.init(cfg.train.seed);
  harness::save_checkpoint(harness::make_checkpoint(fresh.parameters(), harness::serialize_config(cfg)), untrained);
  const auto base = cli({"eval-eer", "--ckpt", untrained.string(), "--data", data.string(), "--trials", "200",
                         "--seed", "1"});
  if (base.code != 0) {
    d.failure = "eval-eer (untrained) failed: " + base.err;
    return d;
  }
  d.untrained_eer = base.out;
  d.trained_seen = seen_eer_percent(d.trained_eer);
  d.untrained_seen = seen_eer_percent(d.untrained_eer);
  d.seconds = seconds_since(t0);
  d.ok = true;
  return d;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

Outcome desk_learning(const DeskRun& d) {
  if (!d.ok) return {false, d.failure};
  const bool pass = d.best_val_acc >= 0.8 && d.trained_seen <= 20.0 && std::abs(d.untrained_seen - 50.0) <= 5.0 &&
                    d.seconds <= 15 * 60;
  return {pass, "val acc " + fmt("%.3f", d.best_val_acc) + ", trained [" + trim(d.trained_eer) + "], untrained [" +
                    trim(d.untrained_eer) + "], " + fmt("%.0f", d.seconds) + " s"};
}

Outcome determinism(const DeskRun& first, const DeskRun& second) {
  if (!first.ok || !second.ok) return {false, first.ok ? second.failure : first.failure};
  const bool same = first.log == second.log && first.trained_eer == second.trained_eer &&
                    first.untrained_eer == second.untrained_eer;
  return {same, same ? "training log and EER lines identical" : "runs differ"};
}

Outcome checkpoint_handling(const fs::path& work) {
  model::SpeakerNet net(swap_model());
  net.init(9);
  const auto ckpt = harness::make_checkpoint(net.parameters(), "seed = 9\n");
  const fs::path a = work / "roundtrip-a.ckpt", b = work / "roundtrip-b.ckpt";
  harness::save_checkpoint(ckpt, a);
  const auto loaded = harness::load_checkpoint(a);
  harness::save_checkpoint(loaded, b);
  bool stable = testing::read_file(a) == testing::read_file(b) && loaded.names == ckpt.names;
  for (std::size_t i = 0; stable && i < ckpt.values.size(); ++i) stable = loaded.values[i] == ckpt.values[i];
  model::SpeakerNet restored(swap_model());
  harness::apply_checkpoint(loaded, restored.parameters());
  const auto again = harness::make_checkpoint(restored.parameters(), "seed = 9\n");
  stable = stable && harness::encode_checkpoint(again) == harness::encode_checkpoint(ckpt);

  const auto bytes = harness::encode_checkpoint(ckpt);
  auto kind_of = [](std::vector<std::uint8_t> broken) -> std::string {
    try {
      harness::decode_checkpoint(broken);
      return "accepted";
    } catch (const harness::CheckpointError& e) {
      return e.what();
    }
  };
  auto magic = bytes;
  magic[1] = 'X';
  auto version = bytes;
  version[4] = 7;
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 2));
  const std::string m = kind_of(magic), v = kind_of(version), t = kind_of(cut);
  const bool distinct = m.find("bad magic") != std::string::npos && v.find("version") != std::string::npos &&
                        t.find("truncated") != std::string::npos && std::set<std::string>{m, v, t}.size() == 3;
  return {stable && distinct, std::string(stable ? "bitwise stable" : "round trip differs") + "; [" + m + "] [" + v +
                                  "] [" + t + "]"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string workdir = (fs::temp_directory_path() / "mirnet_acceptance").string();
  std::string desk_config = MIRNET_DESK_CONFIG;
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Scratch directory for corpora and checkpoints");
  app.add_option("--desk-config", desk_config, "Config used for the desk-scale learning run");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = workdir;
  fs::create_directories(work);
  auto selected = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  bool all = true;
  auto report = [&](int n, const std::string& name, const std::function<Outcome()>& run) {
    if (!selected(n)) return;
    const Outcome o = run();
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")"
              << std::endl;
  };

  report(1, "gradient correctness", gradient_correctness);
  report(2, "PIT equivalence", pit_equivalence);
  report(3, "attention swap identity", attention_swap);
  report(4, "channel flip involution", flip_involution);
  report(5, "EER oracle", eer_oracle);
  report(6, "shape faithfulness", shape_faithfulness);

  if (selected(7) || selected(8)) {
    const DeskRun first = desk_run(work, desk_config, "desk-a");
    report(7, "desk-scale learning", [&] { return desk_learning(first); });
    if (selected(8)) {
      const DeskRun second = desk_run(work, desk_config, "desk-b");
      report(8, "determinism", [&] { return determinism(first, second); });
    }
  }
  report(9, "checkpoint handling", [&] { return checkpoint_handling(work); });
  return all ? 0 : 1;
}

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
#include <cstring>
#include <fstream>
#include <set>

#include "doctest.h"
#include "mirnet/frontend/synth.hpp"
#include "mirnet/harness/checkpoint.hpp"
#include "mirnet/harness/config.hpp"
#include "mirnet/harness/corpus.hpp"
#include "mirnet/harness/pipeline.hpp"
#include "testing.hpp"

using namespace mirnet;
using namespace mirnet::harness;
namespace fs = std::filesystem;
using numerics::Tensor;

namespace {

Checkpoint sample_checkpoint() {
  Rng rng(1);
  Checkpoint c;
  c.config_text = "nfft = 512\nseed = 3\n";
  c.names = {"a.weight", "scalar", "b.bias"};
  c.values = {testing::random_tensor({2, 3, 4}, rng), Tensor({1}, -0.0), testing::random_tensor({5}, rng)};
  c.values[2][1] = 1e-310;  // subnormal
  return c;
}

CheckpointError::Kind decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  FAIL("decoding should have failed");
  return CheckpointError::Kind::io;
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.model.stft.nfft = 256;
  c.model.stft.frame_ms = 1.0 / 3.0;
  c.model.backbone.widths = {3, 7, 11};
  c.model.length_norm = true;
  c.train.learning_rate = 0.1 + 0.2;
  c.train.optimizer = train::Optimizer::sgd;
  c.train.seed = 0xFFFFFFFFFFFFFFFFull;
  const std::string text = serialize_config(c);
  const RunConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.model.stft.frame_ms == c.model.stft.frame_ms);
  CHECK(back.train.learning_rate == c.train.learning_rate);
  CHECK(back.train.seed == c.train.seed);
  CHECK(back.model.backbone.widths == c.model.backbone.widths);

  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == config_keys().size());
}

TEST_CASE("config syntax") {
  const RunConfig c = parse_config("# comment\n\n  nfft=128   # trailing\nlearning_rate = 0.5\noptimizer = sgd\n");
  CHECK(c.model.stft.nfft == 128);
  CHECK(c.train.learning_rate == 0.5);
  CHECK(c.train.optimizer == train::Optimizer::sgd);

  RunConfig o;
  apply_override(o, "batch_size=3");
  CHECK(o.train.batch_size == 3);
  CHECK_THROWS_AS(apply_override(o, "batch_size"), std::invalid_argument);

  CHECK_THROWS_WITH_AS(parse_config("nfft = 64\nlearnig_rate = 1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("nfft 64\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("learning_rate = nan\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("batch_size = -1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("optimizer = rmsprop\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("length_norm = maybe\n"), std::invalid_argument);
}

TEST_CASE("unknown keys list every valid key") {
  try {
    parse_config("colour = blue\n");
    FAIL("unknown key accepted");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("colour") != std::string::npos);
    for (const auto& k : config_keys()) CHECK(what.find(k) != std::string::npos);
  }
}

TEST_CASE("checkpoint bytes") {
  const Checkpoint c = sample_checkpoint();
  const auto bytes = encode_checkpoint(c);
  CHECK(std::memcmp(bytes.data(), "MIRN", 4) == 0);
  CHECK(read_u32(bytes, 4) == 1);
  CHECK(read_u32(bytes, 8) == c.config_text.size());
  const std::size_t count_at = 12 + c.config_text.size();
  CHECK(read_u32(bytes, count_at) == 3);
  CHECK(read_u32(bytes, count_at + 4) == 8);  // "a.weight"
  const std::size_t rank_at = count_at + 8 + 8;
  CHECK(read_u32(bytes, rank_at) == 3);
  CHECK(read_u32(bytes, rank_at + 4) == 2);
  CHECK(read_u32(bytes, rank_at + 8) == 3);
  CHECK(read_u32(bytes, rank_at + 12) == 4);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + rank_at + 16, 8);
  CHECK(first == c.values[0][0]);

  std::size_t expected = 12 + c.config_text.size() + 4;
  for (std::size_t i = 0; i < c.names.size(); ++i) {
    expected += 4 + c.names[i].size() + 4 + 4 * c.values[i].shape().size() + 8 * c.values[i].size();
  }
  CHECK(bytes.size() == expected);
}

TEST_CASE("checkpoint round trip is bitwise stable") {
  const Checkpoint c = sample_checkpoint();
  const fs::path dir = testing::scratch_dir("ckpt");
  save_checkpoint(c, dir / "a.ckpt");
  const Checkpoint back = load_checkpoint(dir / "a.ckpt");
  CHECK(back.config_text == c.config_text);
  CHECK(back.names == c.names);
  CHECK(encode_checkpoint(back) == encode_checkpoint(c));
  CHECK(std::signbit(back.values[1][0]));
  save_checkpoint(back, dir / "b.ckpt");
  CHECK(encode_checkpoint(load_checkpoint(dir / "b.ckpt")) == encode_checkpoint(c));
}

TEST_CASE("three kinds of corruption are told apart") {
  const auto good = encode_checkpoint(sample_checkpoint());

  auto magic = good;
  magic[0] = 'X';
  CHECK(decode_error(magic) == CheckpointError::Kind::bad_magic);
  CHECK(decode_error({'M', 'I'}) == CheckpointError::Kind::bad_magic);

  auto version = good;
  version[4] = 2;
  CHECK(decode_error(version) == CheckpointError::Kind::version_mismatch);

  // Every proper prefix past the header is truncated, never a crash.
  for (std::size_t len = 8; len < good.size(); ++len) {
    CHECK(decode_error({good.begin(), good.begin() + static_cast<long>(len)}) == CheckpointError::Kind::truncated);
  }

  try {
    decode_checkpoint(magic);
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
  }
  try {
    decode_checkpoint({good.begin(), good.end() - 3});
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }

  CHECK_THROWS_AS(load_checkpoint(testing::scratch_dir("ckpt_missing") / "none.ckpt"), CheckpointError);
}

TEST_CASE("checkpoints apply only to matching stores") {
  numerics::ParameterStore store;
  store.add("x", {2, 2});
  store.add("y", {3});
  Rng rng(2);
  store.get("x").value = testing::random_tensor({2, 2}, rng);
  store.get("y").value = testing::random_tensor({3}, rng);
  const Checkpoint c = make_checkpoint(store, "");

  numerics::ParameterStore same;
  same.add("x", {2, 2});
  same.add("y", {3});
  apply_checkpoint(c, same);
  CHECK(same.get("x").value == store.get("x").value);
  CHECK(same.get("y").value == store.get("y").value);

  numerics::ParameterStore reshaped;
  reshaped.add("x", {2, 2});
  reshaped.add("y", {4});
  CHECK_THROWS_WITH(apply_checkpoint(c, reshaped), doctest::Contains("y"));

  numerics::ParameterStore renamed;
  renamed.add("x", {2, 2});
  renamed.add("z", {3});
  CHECK_THROWS_WITH(apply_checkpoint(c, renamed), doctest::Contains("'y'"));

  numerics::ParameterStore fewer;
  fewer.add("x", {2, 2});
  CHECK_THROWS(apply_checkpoint(c, fewer));
}

TEST_CASE("synthetic corpus layout") {
  const fs::path dir = testing::scratch_dir("synth_corpus");
  fs::remove_all(dir);
  SynthCorpusSpec spec;
  spec.seen_speakers = 4;
  spec.unseen_speakers = 4;
  spec.utterances = 5;
  spec.seconds = 0.5;
  write_synthetic_corpus(dir, spec);
  const CorpusIndex index = index_corpus(dir);
  CHECK(index.speakers.size() == 8);
  CHECK(index.train_speakers().size() == 4);
  CHECK(index.splits.at("train").size() == 4 * 3);
  CHECK(index.splits.at("val").size() == 4);
  CHECK(index.splits.at("eval_seen").size() == 4);
  CHECK(index.splits.at("eval_unseen").size() == 4 * 5);
  for (const auto& split : kSplits) CHECK(fs::exists(dir / (split + ".lst")));

  std::set<std::string> seen_speakers;
  for (const auto& key : index.splits.at("train")) seen_speakers.insert(index.speaker_of.at(key));
  for (const auto& key : index.splits.at("eval_unseen")) CHECK(seen_speakers.count(index.speaker_of.at(key)) == 0);

  const auto wave = frontend::load_wav(index.path(index.splits.at("train")[0]));
  CHECK(wave.sample_rate == 16000);
  CHECK(wave.samples.size() == 8000);

  // Same spec, same bytes.
  const fs::path again = testing::scratch_dir("synth_corpus_again");
  fs::remove_all(again);
  write_synthetic_corpus(again, spec);
  const std::string key = index.splits.at("val")[2];
  CHECK(frontend::load_wav(dir / key).samples == frontend::load_wav(again / key).samples);
}

TEST_CASE("manifest-free corpus splits each speaker 60/20/20") {
  const fs::path dir = testing::scratch_dir("plain_corpus");
  fs::remove_all(dir);
  Rng rng(3);
  for (int s = 0; s < 2; ++s) {
    fs::create_directories(dir / ("spk" + std::to_string(s)));
    for (int u = 0; u < 5; ++u) {
      frontend::save_wav(frontend::synth_speaker(s, 0.2, rng),
                         dir / ("spk" + std::to_string(s)) / ("u" + std::to_string(u) + ".wav"));
    }
  }
  const CorpusIndex index = index_corpus(dir);
  CHECK(index.splits.at("train") == std::vector<std::string>{"spk0/u0.wav", "spk0/u1.wav", "spk0/u2.wav",
                                                               "spk1/u0.wav", "spk1/u1.wav", "spk1/u2.wav"});
  CHECK(index.splits.at("val") == std::vector<std::string>{"spk0/u3.wav", "spk1/u3.wav"});
  CHECK(index.splits.at("eval_seen") == std::vector<std::string>{"spk0/u4.wav", "spk1/u4.wav"});
  CHECK(index.train_speakers() == std::vector<std::string>{"spk0", "spk1"});
}

TEST_CASE("corpus indexing reports every failure") {
  const fs::path dir = testing::scratch_dir("broken_corpus");
  fs::remove_all(dir);
  Rng rng(4);
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  frontend::save_wav(frontend::synth_speaker(0, 0.2, rng), dir / "a" / "good.wav");
  write_text(dir / "a" / "junk.wav", "not a wav file");
  frontend::Waveform slow = frontend::synth_speaker(1, 0.2, rng);
  slow.sample_rate = 8000;
  frontend::save_wav(slow, dir / "b" / "slow.wav");
  write_text(dir / "train.lst", "a/good.wav\na/missing.wav\n");
  write_text(dir / "eval_unseen.lst", "a/good.wav\n");
  try {
    index_corpus(dir);
    FAIL("broken corpus accepted");
  } catch (const CorpusError& e) {
    const auto& f = e.failures();
    CHECK(f.size() == 4);
    auto mentions = [&](const std::string& s) {
      return std::any_of(f.begin(), f.end(), [&](const std::string& x) { return x.find(s) != std::string::npos; });
    };
    CHECK(mentions("junk.wav"));
    CHECK(mentions("slow.wav"));
    CHECK(mentions("missing.wav"));
    CHECK(mentions("unseen"));
  }
  CHECK_THROWS(index_corpus(dir / "nowhere"));
}

TEST_CASE("eer line format") {
  EerRun run;
  run.seen.resize(200);
  run.seen_eer.eer = 0.125;
  CHECK(format_eer_line(run) == "seen_eer=12.50 unseen_eer=n/a trials=200");
  run.unseen_eer = eval::EERResult{};
  run.unseen_eer->eer = 1.0 / 3.0;
  CHECK(format_eer_line(run) == "seen_eer=12.50 unseen_eer=33.33 trials=200");
}

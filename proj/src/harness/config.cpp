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

#include "mirnet/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mirnet::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a finite number");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not an unsigned integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "': '" + v + "' is not true/false");
}

std::vector<std::size_t> to_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_size(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Key dbl(std::string name, Member member) {
  return {std::move(name),
          [member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(member(c)); }};
}

template <typename Member>
Key size(std::string name, Member member) {
  return {std::move(name),
          [member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_size(k, v); },
          [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(dbl("frame_ms", [](auto& c) -> auto& { return c.model.stft.frame_ms; }));
    t.push_back(dbl("hop_ms", [](auto& c) -> auto& { return c.model.stft.hop_ms; }));
    t.push_back(size("nfft", [](auto& c) -> auto& { return c.model.stft.nfft; }));
    t.push_back(dbl("segment_seconds", [](auto& c) -> auto& { return c.model.segment_seconds; }));
    t.push_back(size("encoder_scale", [](auto& c) -> auto& { return c.model.encoder_scale; }));
    t.push_back(size("attention_hidden", [](auto& c) -> auto& { return c.model.attention_hidden; }));
    t.push_back({"backbone_widths",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.model.backbone.widths = to_list(k, v);
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t w : c.model.backbone.widths) s += (s.empty() ? "" : ",") + std::to_string(w);
                   return s;
                 }});
    t.push_back(size("backbone_blocks", [](auto& c) -> auto& { return c.model.backbone.blocks; }));
    t.push_back(size("embed_dim", [](auto& c) -> auto& { return c.model.backbone.embed_dim; }));
    t.push_back({"length_norm",
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.model.length_norm = to_bool(k, v); },
                 [](const RunConfig& c) { return std::string(c.model.length_norm ? "true" : "false"); }});
    t.push_back(size("num_classes", [](auto& c) -> auto& { return c.model.num_classes; }));
    t.push_back(dbl("learning_rate", [](auto& c) -> auto& { return c.train.learning_rate; }));
    t.push_back(size("batch_size", [](auto& c) -> auto& { return c.train.batch_size; }));
    t.push_back(size("epochs", [](auto& c) -> auto& { return c.train.epochs; }));
    t.push_back({"seed",
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = to_u64(k, v); },
                 [](const RunConfig& c) { return std::to_string(c.train.seed); }});
    t.push_back({"optimizer",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v == "adam") {
                     c.train.optimizer = train::Optimizer::adam;
                   } else if (v == "sgd") {
                     c.train.optimizer = train::Optimizer::sgd;
                   } else {
                     throw std::invalid_argument("config key '" + k + "': expected adam or sgd, got '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.optimizer == train::Optimizer::adam ? "adam" : "sgd");
                 }});
    t.push_back(dbl("momentum", [](auto& c) -> auto& { return c.train.momentum; }));
    t.push_back(dbl("beta1", [](auto& c) -> auto& { return c.train.beta1; }));
    t.push_back(dbl("beta2", [](auto& c) -> auto& { return c.train.beta2; }));
    t.push_back(dbl("epsilon", [](auto& c) -> auto& { return c.train.epsilon; }));
    t.push_back(size("patience", [](auto& c) -> auto& { return c.train.patience; }));
    t.push_back(size("pairs_per_epoch", [](auto& c) -> auto& { return c.train.pairs_per_epoch; }));
    t.push_back(size("val_mixtures", [](auto& c) -> auto& { return c.train.val_mixtures; }));
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : keys()) n.push_back(k.name);
    return n;
  }();
  return names;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(cfg, key, value);
      return;
    }
  }
  std::string valid;
  for (const auto& name : config_keys()) valid += (valid.empty() ? "" : ", ") + name;
  throw std::invalid_argument("unknown config key '" + key + "'; valid keys: " + valid);
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                                  line + "'");
    }
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override '" + assignment + "' is not of the form key=value");
  }
  set_config_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace mirnet::harness

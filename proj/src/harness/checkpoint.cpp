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

#include "mirnet/harness/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace mirnet::harness {
namespace {

constexpr char kMagic[4] = {'M', 'I', 'R', 'N'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::truncated,
                            std::string("checkpoint truncated while reading ") + what + " at byte " +
                                std::to_string(pos_));
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.names.size() != ckpt.values.size()) {
    throw CheckpointError(CheckpointError::Kind::malformed, "checkpoint has mismatched name and value counts");
  }
  Writer w;
  w.raw(kMagic, 4);
  w.u32(ckpt.version);
  w.str(ckpt.config_text);
  w.u32(static_cast<std::uint32_t>(ckpt.names.size()));
  for (std::size_t i = 0; i < ckpt.names.size(); ++i) {
    const auto& t = ckpt.values[i];
    w.str(ckpt.names[i]);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.data()) w.f64(v);
  }
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    // A file shorter than the magic cannot be told apart from a foreign one.
    throw CheckpointError(CheckpointError::Kind::bad_magic, "bad magic: not a MIRN checkpoint");
  }
  std::vector<std::uint8_t> rest(bytes.begin() + 4, bytes.end());
  Reader r(rest);
  Checkpoint c;
  c.version = r.u32("version");
  if (c.version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::version_mismatch,
                          "checkpoint version mismatch: file has " + std::to_string(c.version) + ", expected " +
                              std::to_string(kCheckpointVersion));
  }
  c.config_text = r.str("config text");
  const std::uint32_t count = r.u32("parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    c.names.push_back(r.str("parameter name"));
    const std::uint32_t rank = r.u32("rank");
    numerics::Shape shape;
    std::uint64_t total = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const std::uint32_t d = r.u32("dimension");
      if (d == 0) {
        throw CheckpointError(CheckpointError::Kind::malformed,
                              "parameter '" + c.names.back() + "' has a zero dimension");
      }
      shape.push_back(d);
      total *= d;
    }
    if (total > r.remaining() / 8) r.need(total * 8, "parameter values");
    numerics::Tensor t(shape);
    for (double& v : t.data()) v = r.f64("parameter values");
    c.values.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw CheckpointError(CheckpointError::Kind::malformed,
                          std::to_string(r.remaining()) + " trailing bytes after the last parameter");
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError(CheckpointError::Kind::io, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::io, path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, path.string() + ": cannot open checkpoint");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

Checkpoint make_checkpoint(const numerics::ParameterStore& store, const std::string& config_text) {
  Checkpoint c;
  c.config_text = config_text;
  for (std::size_t i = 0; i < store.size(); ++i) {
    c.names.push_back(store[i].name);
    c.values.push_back(store[i].value);
  }
  return c;
}

void apply_checkpoint(const Checkpoint& ckpt, numerics::ParameterStore& store) {
  if (ckpt.names.size() != store.size()) {
    throw std::invalid_argument("checkpoint holds " + std::to_string(ckpt.names.size()) +
                                " parameters but the model has " + std::to_string(store.size()));
  }
  for (std::size_t i = 0; i < ckpt.names.size(); ++i) {
    auto* p = store.find(ckpt.names[i]);
    if (!p) throw std::invalid_argument("checkpoint parameter '" + ckpt.names[i] + "' is not part of the model");
    if (p->value.shape() != ckpt.values[i].shape()) {
      throw std::invalid_argument("dimension mismatch for '" + ckpt.names[i] + "': checkpoint " +
                                  numerics::shape_str(ckpt.values[i].shape()) + ", model " +
                                  numerics::shape_str(p->value.shape()));
    }
    p->value = ckpt.values[i];
  }
}

}  // namespace mirnet::harness

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

#include "mirnet/frontend/audio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mirnet::frontend {
namespace {

constexpr double kLogFloor = 1e-6;

// The FFTW planner is not thread-safe; plan creation and destruction are serialised.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::size_t StftConfig::win_len() const {
  return static_cast<std::size_t>(std::lround(frame_ms * sample_rate / 1000.0));
}

std::size_t StftConfig::hop_len() const {
  return static_cast<std::size_t>(std::lround(hop_ms * sample_rate / 1000.0));
}

std::size_t frame_count(std::size_t num_samples, const StftConfig& cfg) {
  const std::size_t win = cfg.win_len();
  if (num_samples < win) return 0;
  return (num_samples - win) / cfg.hop_len() + 1;
}

Spectrogram stft_log_magnitude(const Waveform& wave, const StftConfig& cfg) {
  const std::size_t win = cfg.win_len();
  const std::size_t hop = cfg.hop_len();
  if (win == 0 || hop == 0) throw std::invalid_argument("stft: frame and hop must be positive");
  if (win > cfg.nfft) {
    throw std::invalid_argument("stft: frame of " + std::to_string(win) +
                                " samples exceeds nfft " + std::to_string(cfg.nfft));
  }
  if (wave.sample_rate != cfg.sample_rate) {
    throw std::invalid_argument("stft: waveform rate " + std::to_string(wave.sample_rate) +
                                " Hz differs from analysis rate " + std::to_string(cfg.sample_rate));
  }
  const std::size_t frames = frame_count(wave.samples.size(), cfg);
  if (frames == 0) {
    throw std::invalid_argument("stft: input of " + std::to_string(wave.samples.size()) +
                                " samples is shorter than one frame (" + std::to_string(win) + ")");
  }
  const std::size_t bins = cfg.bins();

  std::vector<double> window(win);
  for (std::size_t n = 0; n < win; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(win));
  }

  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(cfg.nfft));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(bins));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(cfg.nfft), in.get(), out.get(), FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("stft: FFTW planning failed");

  Spectrogram spec{numerics::Tensor({bins, frames})};
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = wave.samples.data() + t * hop;
    double* buf = in.get();
    for (std::size_t n = 0; n < win; ++n) buf[n] = src[n] * window[n];
    std::fill(buf + win, buf + cfg.nfft, 0.0);
    fftw_execute(plan);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mag = std::hypot(out.get()[k][0], out.get()[k][1]);
      spec.values.at(k, t) = std::log(mag + kLogFloor);
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return spec;
}

void normalize_utterance(Spectrogram& spec) {
  auto data = spec.values.data();
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : data) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : data) v = (v - mean) * inv_std;
}

Segment sample_segment(const Waveform& wave, double seconds, Rng& rng) {
  const auto length = static_cast<std::size_t>(std::lround(seconds * wave.sample_rate));
  if (length == 0) throw std::invalid_argument("sample_segment: segment length is zero");
  if (wave.samples.size() < length) {
    throw std::invalid_argument("sample_segment: utterance '" + wave.utterance_id + "' has " +
                                std::to_string(wave.samples.size()) + " samples, segment needs " +
                                std::to_string(length));
  }
  const std::size_t offset = uniform_index(rng, wave.samples.size() - length + 1);
  Segment seg;
  seg.offset = offset;
  seg.wave.sample_rate = wave.sample_rate;
  seg.wave.speaker_id = wave.speaker_id;
  seg.wave.utterance_id = wave.utterance_id;
  seg.wave.samples.assign(wave.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                          wave.samples.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return seg;
}

Waveform pad_to(const Waveform& wave, std::size_t length) {
  Waveform out = wave;
  if (out.samples.size() < length) out.samples.resize(length, 0.0);
  return out;
}

MixtureSample mix(const Waveform& a, const Waveform& b) {
  if (a.sample_rate != b.sample_rate) {
    throw std::invalid_argument("mix: sample rates differ (" + std::to_string(a.sample_rate) +
                                " vs " + std::to_string(b.sample_rate) + ")");
  }
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("mix: lengths differ (" + std::to_string(a.samples.size()) +
                                " vs " + std::to_string(b.samples.size()) + ")");
  }
  if (a.speaker_id && b.speaker_id && *a.speaker_id == *b.speaker_id) {
    throw std::invalid_argument("mix: both sources belong to speaker " +
                                std::to_string(*a.speaker_id));
  }
  MixtureSample m;
  m.mixture.sample_rate = a.sample_rate;
  m.mixture.samples.resize(a.samples.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    m.mixture.samples[i] = a.samples[i] + b.samples[i];
    peak = std::max(peak, std::abs(m.mixture.samples[i]));
  }
  if (peak > 0.0) {
    const double gain = kMixturePeak / peak;
    for (double& s : m.mixture.samples) s *= gain;
  }
  m.label_a = a.speaker_id.value_or(-1);
  m.label_b = b.speaker_id.value_or(-1);
  m.utterance_a = a.utterance_id;
  m.utterance_b = b.utterance_id;
  m.mixture.utterance_id = a.utterance_id + "+" + b.utterance_id;
  return m;
}

}  // namespace mirnet::frontend

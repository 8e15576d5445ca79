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
#include <string>

#include "mirnet/frontend/wav.hpp"
#include "mirnet/numerics/tensor.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::frontend {

/// Analysis settings. Defaults: 32 ms Hann frames every 10 ms, 512-point FFT (257 bins).
struct StftConfig {
  double frame_ms = 32.0;
  double hop_ms = 10.0;
  std::size_t nfft = 512;
  int sample_rate = kSampleRate;

  std::size_t win_len() const;
  std::size_t hop_len() const;
  std::size_t bins() const { return nfft / 2 + 1; }
};

/// Log-magnitude values laid out [bins x frames].
struct Spectrogram {
  numerics::Tensor values;

  std::size_t bins() const { return values.dim(0); }
  std::size_t frames() const { return values.dim(1); }
};

/// floor((num_samples - win_len) / hop_len) + 1; zero if shorter than one frame.
std::size_t frame_count(std::size_t num_samples, const StftConfig& cfg);

/// Hann-windowed |FFT| per frame, stored as ln(magnitude + 1e-6).
Spectrogram stft_log_magnitude(const Waveform& wave, const StftConfig& cfg = {});

/// Per-utterance mean/variance normalisation over every value of the matrix.
void normalize_utterance(Spectrogram& spec);

struct Segment {
  Waveform wave;
  std::size_t offset = 0;
};

/// Contiguous slice of round(seconds * rate) samples at a uniformly drawn offset.
Segment sample_segment(const Waveform& wave, double seconds, Rng& rng);

/// Copy zero-padded (or left as is) to at least `length` samples.
Waveform pad_to(const Waveform& wave, std::size_t length);

/// Two-talker mixture with its ground-truth labels. A label of -1 means unknown.
struct MixtureSample {
  Waveform mixture;
  int label_a = -1;
  int label_b = -1;
  std::array<std::size_t, 2> offsets{0, 0};
  std::uint64_t seed = 0;
  std::string utterance_a;
  std::string utterance_b;
};

inline constexpr double kMixturePeak = 0.9;

/// Sums a and b sample by sample and rescales the sum to a peak of 0.9.
/// Both inputs must share length and rate; known speaker ids must differ.
MixtureSample mix(const Waveform& a, const Waveform& b);

}  // namespace mirnet::frontend

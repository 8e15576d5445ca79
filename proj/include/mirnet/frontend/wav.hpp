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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mirnet::frontend {

inline constexpr int kSampleRate = 16000;

/// Mono audio in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
  std::optional<int> speaker_id;
  std::string utterance_id;

  double seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Reads a RIFF/WAVE file holding 16-bit PCM, one channel, 16 kHz.
/// Samples are scaled by 1/32768. The utterance id is the file stem.
Waveform load_wav(const std::filesystem::path& path);
Waveform decode_wav(std::span<const std::uint8_t> bytes, const std::string& name);

/// Writes 16-bit PCM mono: clamp to [-1, 1], scale by 32767, round half away from zero.
void save_wav(const Waveform& wave, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(const Waveform& wave);

}  // namespace mirnet::frontend

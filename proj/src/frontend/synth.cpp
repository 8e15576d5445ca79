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

#include "mirnet/frontend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mirnet::frontend {
namespace {

double frac(double x) { return x - std::floor(x); }

// Additive low-discrepancy sequences: (id + 1) * irrational mod 1 never repeats.
double sequence(int id, double irrational) { return frac(static_cast<double>(id + 1) * irrational); }

constexpr double kGolden = 0.6180339887498949;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.2360679774997896;

double resonance(double f, double centre, double bandwidth) {
  const double z = (f - centre) / bandwidth;
  return std::exp(-0.5 * z * z);
}

}  // namespace

SpeakerProfile speaker_profile(int speaker_id) {
  SpeakerProfile p;
  p.f0 = 90.0 * std::exp2(2.0 * sequence(speaker_id, kGolden));
  p.formant1 = 300.0 + 700.0 * sequence(speaker_id, kSqrt2);
  p.formant2 = 1100.0 + 2200.0 * sequence(speaker_id, kSqrt3);
  p.gain2 = 0.3 + 0.7 * sequence(speaker_id, kSqrt5);
  return p;
}

Waveform synth_speaker(int speaker_id, double seconds, Rng& rng, int sample_rate) {
  const SpeakerProfile p = speaker_profile(speaker_id);
  const auto n = static_cast<std::size_t>(std::lround(seconds * sample_rate));
  const double sr = static_cast<double>(sample_rate);
  const double two_pi = 2.0 * std::numbers::pi;

  const double f0 = p.f0 * (1.0 + uniform(rng, -0.01, 0.01));
  const double vib_rate = uniform(rng, 4.0, 6.0);
  const double vib_depth = 0.01;
  const double vib_phase = uniform(rng, 0.0, two_pi);
  const double f1 = p.formant1 * (1.0 + uniform(rng, -0.03, 0.03));
  const double f2 = p.formant2 * (1.0 + uniform(rng, -0.03, 0.03));

  const double nyquist_guard = 0.45 * sr;
  const std::size_t harmonics = static_cast<std::size_t>(nyquist_guard / (f0 * (1.0 + vib_depth)));
  std::vector<double> amp(harmonics), phase(harmonics);
  for (std::size_t h = 0; h < harmonics; ++h) {
    const double fh = f0 * static_cast<double>(h + 1);
    amp[h] = resonance(fh, f1, 120.0) + p.gain2 * resonance(fh, f2, 200.0) + 0.03;
    phase[h] = uniform(rng, 0.0, two_pi);
  }

  // Syllable gating: alternating voiced/silent stretches with 20 ms ramps.
  std::vector<double> gate(n, 0.0);
  {
    const std::size_t ramp = static_cast<std::size_t>(0.02 * sr);
    std::size_t pos = 0;
    while (pos < n) {
      const auto len = static_cast<std::size_t>(uniform(rng, 0.12, 0.30) * sr);
      const bool voiced = uniform01(rng) < 0.75;
      const std::size_t end = std::min(n, pos + len);
      if (voiced) {
        for (std::size_t i = pos; i < end; ++i) {
          const std::size_t from_start = i - pos, to_end = end - 1 - i;
          const std::size_t edge = std::min(from_start, to_end);
          gate[i] = edge >= ramp ? 1.0
                                 : 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) /
                                                        static_cast<double>(ramp));
        }
      }
      pos = end;
    }
  }

  Waveform w;
  w.sample_rate = sample_rate;
  w.speaker_id = speaker_id;
  w.samples.assign(n, 0.0);
  double base_phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double inst_f0 = f0 * (1.0 + vib_depth * std::sin(two_pi * vib_rate * t + vib_phase));
    base_phase += two_pi * inst_f0 / sr;
    if (base_phase >= two_pi) base_phase -= two_pi;
    if (gate[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t h = 0; h < harmonics; ++h) {
      s += amp[h] * std::sin(static_cast<double>(h + 1) * base_phase + phase[h]);
    }
    w.samples[i] = gate[i] * s;
  }
  for (double& s : w.samples) s += 1e-3 * uniform(rng, -1.0, 1.0);

  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (double& s : w.samples) s *= 0.5 / peak;
  }
  return w;
}

}  // namespace mirnet::frontend

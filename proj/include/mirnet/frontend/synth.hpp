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

#include "mirnet/frontend/wav.hpp"
#include "mirnet/util/random.hpp"

namespace mirnet::frontend {

/// Deterministic voice of a synthetic speaker.
struct SpeakerProfile {
  double f0 = 0.0;        // Hz
  double formant1 = 0.0;  // Hz
  double formant2 = 0.0;  // Hz
  double gain2 = 0.0;     // second resonance gain relative to the first
};

/// Profile derived from the id alone; distinct ids give distinct f0.
SpeakerProfile speaker_profile(int speaker_id);

/// Harmonic complex shaped by the speaker's resonances with syllable-like
/// gating. The rng adds per-utterance jitter (pitch, vibrato, resonance
/// shift, harmonic phases, gating pattern) so utterances of one speaker differ.
/// Peak amplitude is 0.5.
Waveform synth_speaker(int speaker_id, double seconds, Rng& rng, int sample_rate = kSampleRate);

}  // namespace mirnet::frontend

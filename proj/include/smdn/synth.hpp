// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Synthetic toy-speaker corpus. Each speaker is a harmonic source with its
// own fundamental and a 2-pole resonance, amplitude-modulated at a syllabic
// rate. Families occupy disjoint log-f0 and resonance sub-ranges so that a
// speaker's family is recoverable from noisy spectra. Part of the noise
// clips carry a competing harmonic talker from anywhere in the voice range.

#ifndef SMDN_SYNTH_HPP_
#define SMDN_SYNTH_HPP_

#include <cstdint>

#include "smdn/corpus.hpp"
#include "smdn/random.hpp"

namespace smdn {

inline constexpr double kMinF0 = 90.0;
inline constexpr double kMaxF0 = 300.0;

struct SpeakerVoice {
  double f0 = 120.0;
  double resonance_hz = 800.0;
  double radius = 0.95;  // pole radius of the resonator
  int family = 0;
};

struct SynthOptions {
  int train_speakers = 8;
  int val_speakers = 4;
  int test_speakers = 4;
  int utterances_per_speaker = 10;
  int families = 2;
  double family_spread = 0.15;  // fraction of a family's log sub-range its voices span
  double f0_jitter = 0.02;      // per-utterance relative f0 offset bound
  int noises_per_split = 20;
  double voiced_noise_fraction = 0.5;  // share of clips carrying a harmonic interferer
  std::uint64_t seed = 1;
};

/// Draws a voice from family `family` of `families`. The family's spread is
/// cut into `slots` equal cells and the voice lands uniformly in cell `slot`.
SpeakerVoice draw_voice(int family, int families, double spread, Rng& rng, int slot = 0, int slots = 1);

/// One utterance of `length` samples: f0 jittered by up to `jitter`
/// (relative), 4-8 Hz envelope, resonator, random level, quantized to the
/// 16-bit grid.
Waveform render_utterance(const SpeakerVoice& voice, Index length, Rng& rng, double jitter = 0.02);

/// render_utterance without the jitter: the source runs at `f0` with a 1%
/// slow vibrato.
Waveform render_harmonic(const SpeakerVoice& voice, double f0, Index length, Rng& rng);

/// Band-limited noise with bursts; band edges drawn at random. A voiced clip
/// adds a harmonic interferer whose voice is drawn from the whole f0 and
/// resonance range, regardless of family.
Waveform render_noise(Index length, Rng& rng, bool voiced = false);

/// Deterministic given the options. Speakers alternate over families within
/// each split; utterances last 5-6 s; every split gets its own noise clips.
Corpus synth_corpus(const SynthOptions& options);

/// Convenience form: `n_speakers` training speakers, default val/test sizes.
Corpus synth_corpus(int n_speakers, int utterances_per_speaker, std::uint64_t seed);

}  // namespace smdn

#endif  // SMDN_SYNTH_HPP_

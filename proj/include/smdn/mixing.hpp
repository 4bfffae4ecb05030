// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_MIXING_HPP_
#define SMDN_MIXING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "smdn/corpus.hpp"
#include "smdn/random.hpp"

namespace smdn {

inline constexpr double kMinSnrDb = -5.0;
inline constexpr double kMaxSnrDb = 10.0;
/// Segments with less energy than this are redrawn.
inline constexpr double kSilenceEnergy = 1e-10;

struct MixtureSample {
  Waveform mixture;
  Waveform clean;
  Waveform noise;  // scaled, so that mixture - clean - noise == 0 exactly
  double snr_db = 0.0;
  std::string speaker_id;
  std::string utterance_id;
  std::string noise_id;
  std::optional<int> cluster_label;
};

struct PairSample {
  MixtureSample a;
  MixtureSample b;
  int same = 0;
};

/// Noise gain that puts `n` at `snr_db` below `s` over the full segment.
double noise_gain(const Waveform& s, const Waveform& n, double snr_db);

/// Mixes at `snr_db`. The stored noise is mixture - clean, which differs from
/// g * n only by rounding. Throws SilentSegmentError on an energy below
/// kSilenceEnergy and DimensionError on a length mismatch.
MixtureSample mix(const Waveform& s, const Waveform& n, double snr_db);

/// Energy ratio of the two parts in dB.
double measured_snr_db(const Waveform& clean, const Waveform& noise);

/// `length` contiguous samples at a uniform offset. Shorter inputs are tiled
/// first. Throws LengthError on an empty waveform.
Waveform sample_segment(const Waveform& w, Rng& rng, Index length = kSegmentLength);

/// Draws a random segment of `u`, a random noise segment and a uniform SNR,
/// redrawing segments that come out silent.
MixtureSample draw_mixture(const Utterance& u, const std::vector<const NoiseClip*>& noises, Rng& rng,
                           Index length = kSegmentLength);

/// Uniform utterance from `pool` mixed as in draw_mixture.
MixtureSample draw_mixture(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                           Rng& rng, Index length = kSegmentLength);

/// Same-speaker pair with probability 0.5. Same-speaker pairs use two distinct
/// utterances when the speaker has at least two; each side draws its own
/// noise and SNR. Throws ConfigError with fewer than two speakers.
PairSample sample_pair(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                       Rng& rng, Index length = kSegmentLength);

}  // namespace smdn

#endif  // SMDN_MIXING_HPP_

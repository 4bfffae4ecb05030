// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cstdlib>
#include <string>

#include "smdn/stages.hpp"

namespace smdn {

int default_threads() {
  const char* env = std::getenv("SMDN_THREADS");
  if (!env || !*env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    throw ConfigError(std::string("SMDN_THREADS is not a number: ") + env);
  }
}

Prepared prepare(const MixtureSample& m, const StftConfig& cfg) {
  Prepared p;
  const Index frames = cfg.num_frames(m.mixture.size());
  const Index length = cfg.analyzed_length(frames);
  p.mixture = m.mixture.head(length).cast<Real>();
  p.clean = m.clean.head(length).cast<Real>();
  p.noisy = stft(p.mixture, cfg);
  p.mag = p.noisy.magnitude();
  p.speaker = m.speaker_id;
  p.utterance = m.utterance_id;
  p.snr_db = m.snr_db;
  return p;
}

std::vector<Prepared> fixed_mixtures(const std::vector<const Utterance*>& pool,
                                     const std::vector<const NoiseClip*>& noises, int count, std::uint64_t seed,
                                     const StftConfig& cfg) {
  std::vector<Prepared> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::derive(seed, 0x6d6978ULL, static_cast<std::uint64_t>(i));
    out.push_back(prepare(draw_mixture(pool, noises, rng), cfg));
  }
  return out;
}

std::vector<PreparedPair> fixed_pairs(const std::vector<const Utterance*>& pool,
                                      const std::vector<const NoiseClip*>& noises, int count, std::uint64_t seed,
                                      const StftConfig& cfg) {
  std::vector<PreparedPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::derive(seed, 0x70616972ULL, static_cast<std::uint64_t>(i));
    const PairSample p = sample_pair(pool, noises, rng);
    out.push_back({prepare(p.a, cfg).mag, prepare(p.b, cfg).mag, p.same});
  }
  return out;
}

}  // namespace smdn

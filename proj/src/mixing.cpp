// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/mixing.hpp"

#include <cmath>
#include <map>

#include "smdn/errors.hpp"

namespace smdn {

namespace {

constexpr int kMaxRedraws = 100;

double energy(const Waveform& x) { return x.squaredNorm(); }

}  // namespace

double noise_gain(const Waveform& s, const Waveform& n, double snr_db) {
  const double es = energy(s);
  const double en = energy(n);
  if (es < kSilenceEnergy) throw SilentSegmentError("mix: silent speech segment");
  if (en < kSilenceEnergy) throw SilentSegmentError("mix: silent noise segment");
  return std::sqrt(es / (en * std::pow(10.0, snr_db / 10.0)));
}

MixtureSample mix(const Waveform& s, const Waveform& n, double snr_db) {
  if (s.size() != n.size()) throw DimensionError("mix: speech and noise lengths differ");
  const double g = noise_gain(s, n, snr_db);
  MixtureSample out;
  out.clean = s;
  out.mixture = s + g * n;
  out.noise = out.mixture - out.clean;
  out.snr_db = snr_db;
  return out;
}

double measured_snr_db(const Waveform& clean, const Waveform& noise) {
  return 10.0 * std::log10(energy(clean) / energy(noise));
}

Waveform sample_segment(const Waveform& w, Rng& rng, Index length) {
  if (w.size() == 0) throw LengthError("sample_segment: empty waveform");
  if (w.size() < length) {
    const Index reps = (length + w.size() - 1) / w.size();
    return Waveform(w.replicate(reps, 1)).head(length);
  }
  const auto offset = static_cast<Index>(rng.below(static_cast<std::uint64_t>(w.size() - length + 1)));
  return w.segment(offset, length);
}

MixtureSample draw_mixture(const Utterance& u, const std::vector<const NoiseClip*>& noises, Rng& rng, Index length) {
  if (noises.empty()) throw ConfigError("mixing: empty noise pool");
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const Waveform s = sample_segment(*u.audio, rng, length);
    const NoiseClip& nc = *noises[rng.below(noises.size())];
    const Waveform n = sample_segment(*nc.audio, rng, length);
    const double snr = rng.uniform(kMinSnrDb, kMaxSnrDb);
    try {
      MixtureSample m = mix(s, n, snr);
      m.speaker_id = u.speaker;
      m.utterance_id = u.id;
      m.noise_id = nc.id;
      return m;
    } catch (const SilentSegmentError&) {
    }
  }
  throw SilentSegmentError("mixing: no non-silent segment found for " + u.id);
}

MixtureSample draw_mixture(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                           Rng& rng, Index length) {
  if (pool.empty()) throw ConfigError("mixing: empty utterance pool");
  return draw_mixture(*pool[rng.below(pool.size())], noises, rng, length);
}

PairSample sample_pair(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                       Rng& rng, Index length) {
  std::map<std::string, std::vector<const Utterance*>> by_speaker;
  for (const Utterance* u : pool) by_speaker[u->speaker].push_back(u);
  if (by_speaker.size() < 2) throw ConfigError("sample_pair: need at least two speakers for negative pairs");
  std::vector<const std::vector<const Utterance*>*> speakers;
  for (const auto& [id, list] : by_speaker) speakers.push_back(&list);

  PairSample out;
  out.same = rng.uniform() < 0.5 ? 1 : 0;
  const std::size_t i = rng.below(speakers.size());
  const auto& first = *speakers[i];
  const std::size_t ua = rng.below(first.size());
  const Utterance* a = first[ua];
  const Utterance* b = nullptr;
  if (out.same) {
    if (first.size() >= 2) {
      std::size_t ub = rng.below(first.size() - 1);
      if (ub >= ua) ++ub;
      b = first[ub];
    } else {
      b = a;
    }
  } else {
    std::size_t j = rng.below(speakers.size() - 1);
    if (j >= i) ++j;
    const auto& second = *speakers[j];
    b = second[rng.below(second.size())];
  }
  out.a = draw_mixture(*a, noises, rng, length);
  out.b = draw_mixture(*b, noises, rng, length);
  return out;
}

}  // namespace smdn

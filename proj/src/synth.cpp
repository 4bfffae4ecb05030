// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "smdn/errors.hpp"
#include "smdn/wav.hpp"

namespace smdn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNyquist = kSampleRate / 2.0;
constexpr double kMinResonance = 350.0;
constexpr double kMaxResonance = 2600.0;

// Point at relative position `pos` in [-0.5, 0.5] of the f-th of n equal
// log sub-ranges of [lo, hi], measured from the sub-range centre.
double log_band_point(double lo, double hi, int f, int n, double pos) {
  const double step = std::log(hi / lo) / n;
  return std::exp(std::log(lo) + step * (f + 0.5 + pos));
}

std::string padded(int v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

SpeakerVoice draw_voice(int family, int families, double spread, Rng& rng, int slot, int slots) {
  if (families < 1 || family < 0 || family >= families) throw ConfigError("synth: bad family index");
  if (slots < 1 || slot < 0 || slot >= slots) throw ConfigError("synth: bad voice slot");
  if (!(spread > 0.0 && spread <= 1.0)) throw ConfigError("synth: family spread must be in (0, 1]");
  // Within a family, resonance tracks f0 up to a small independent offset, so
  // voices vary mostly along one axis and families stay apart on it.
  const double pos = spread * ((slot + rng.uniform()) / slots - 0.5);
  const double offset = rng.uniform(-spread / 4, spread / 4);
  SpeakerVoice v;
  v.family = family;
  v.f0 = log_band_point(kMinF0, kMaxF0, family, families, pos);
  v.resonance_hz = log_band_point(kMinResonance, kMaxResonance, family, families, std::clamp(pos + offset, -0.5, 0.5));
  return v;
}

Waveform render_utterance(const SpeakerVoice& voice, Index length, Rng& rng, double jitter) {
  return render_harmonic(voice, voice.f0 * (1.0 + rng.uniform(-jitter, jitter)), length, rng);
}

Waveform render_harmonic(const SpeakerVoice& voice, double f0, Index length, Rng& rng) {
  const double vibrato_hz = rng.uniform(0.5, 1.5);
  const double vibrato_phase = rng.uniform(0.0, kTwoPi);
  const double am_hz = rng.uniform(4.0, 8.0);
  const double am_phase = rng.uniform(0.0, kTwoPi);
  const int harmonics = static_cast<int>((kNyquist - 100.0) / (f0 * 1.02));

  Waveform src(length);
  double phase = rng.uniform(0.0, kTwoPi);
  for (Index i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    phase += kTwoPi * f0 * (1.0 + 0.01 * std::sin(kTwoPi * vibrato_hz * t + vibrato_phase)) / kSampleRate;
    if (phase > kTwoPi) phase -= kTwoPi;
    double v = 0.0;
    for (int h = 1; h <= harmonics; ++h) v += std::sin(h * phase) / h;
    const double env = 0.5 * (1.0 - std::cos(kTwoPi * am_hz * t + am_phase));
    src[i] = v * std::pow(env, 1.5);
  }

  // 2-pole resonator, unity gain at DC is not needed: the level is reset below.
  const double c1 = 2.0 * voice.radius * std::cos(kTwoPi * voice.resonance_hz / kSampleRate);
  const double c2 = -voice.radius * voice.radius;
  Waveform out(length);
  double y1 = 0.0;
  double y2 = 0.0;
  for (Index i = 0; i < length; ++i) {
    const double y = src[i] + c1 * y1 + c2 * y2;
    out[i] = y;
    y2 = y1;
    y1 = y;
  }
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(length));
  out *= rng.uniform(0.05, 0.15) / std::max(rms, 1e-12);
  return quantize_pcm16(out);
}

Waveform render_noise(Index length, Rng& rng, bool voiced) {
  const double lo = rng.uniform(50.0, 2000.0);
  const double hi = std::min(lo + rng.uniform(400.0, 2000.0), kNyquist - 50.0);
  std::vector<double> white(static_cast<std::size_t>(length));
  for (auto& v : white) v = rng.normal();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, white);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(std::min(k, spec.size() - k)) * kSampleRate / static_cast<double>(length);
    if (f < lo || f > hi) spec[k] = 0.0;
  }
  std::vector<double> band;
  fft.inv(band, spec);

  // Bursts of 0.2-1 s over a quieter floor, with 20 ms raised-cosine ramps.
  Waveform env = Waveform::Constant(length, rng.uniform(0.2, 0.4));
  const Index ramp = kSampleRate / 50;
  for (Index start = static_cast<Index>(rng.uniform(0.0, 0.5) * kSampleRate); start < length;) {
    const auto dur = static_cast<Index>(rng.uniform(0.2, 1.0) * kSampleRate);
    for (Index i = 0; i < dur && start + i < length; ++i) {
      const double edge = std::min({1.0, static_cast<double>(i) / ramp, static_cast<double>(dur - i) / ramp});
      env[start + i] = std::max(env[start + i], 0.5 * (1.0 - std::cos(std::numbers::pi * edge)));
    }
    start += dur + static_cast<Index>(rng.uniform(0.1, 0.8) * kSampleRate);
  }
  Waveform out(length);
  for (Index i = 0; i < length; ++i) out[i] = band[static_cast<std::size_t>(i)] * env[i];
  out /= std::max(std::sqrt(out.squaredNorm() / static_cast<double>(length)), 1e-12);
  if (voiced) {
    SpeakerVoice v;
    v.f0 = log_band_point(kMinF0, kMaxF0, 0, 1, rng.uniform(-0.5, 0.5));
    v.resonance_hz = log_band_point(kMinResonance, kMaxResonance, 0, 1, rng.uniform(-0.5, 0.5));
    Waveform talker = render_harmonic(v, v.f0, length, rng);
    talker /= std::max(std::sqrt(talker.squaredNorm() / static_cast<double>(length)), 1e-12);
    out = rng.uniform(0.3, 0.6) * out + talker;
  }
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(length));
  out *= 0.1 / std::max(rms, 1e-12);
  return quantize_pcm16(out);
}

Corpus synth_corpus(const SynthOptions& o) {
  if (o.train_speakers + o.val_speakers + o.test_speakers < 2) throw ConfigError("synth: need at least two speakers");
  if (o.utterances_per_speaker < 1 || o.families < 1) throw ConfigError("synth: bad corpus size");
  Corpus corpus;
  const struct {
    Split split;
    int speakers;
    std::uint64_t stream;
  } parts[] = {{Split::kTrain, o.train_speakers, 1}, {Split::kVal, o.val_speakers, 2}, {Split::kTest, o.test_speakers, 3}};
  for (const auto& part : parts) {
    const std::string tag = split_name(part.split);
    const int slots = (part.speakers + o.families - 1) / o.families;
    for (int s = 0; s < part.speakers; ++s) {
      Rng voice_rng = Rng::derive(o.seed, part.stream, static_cast<std::uint64_t>(s));
      const SpeakerVoice voice = draw_voice(s % o.families, o.families, o.family_spread, voice_rng, s / o.families, slots);
      const std::string speaker = tag + "_spk" + padded(s, 2);
      for (int u = 0; u < o.utterances_per_speaker; ++u) {
        Rng rng = Rng::derive(o.seed, part.stream * 1000 + 100 + static_cast<std::uint64_t>(s),
                              static_cast<std::uint64_t>(u));
        const auto length = static_cast<Index>(rng.uniform(5.0, 6.0) * kSampleRate);
        Utterance utt;
        utt.speaker = speaker;
        utt.id = speaker + "_u" + padded(u, 3);
        utt.path = "wav/" + utt.id + ".wav";
        utt.split = part.split;
        utt.family = voice.family;
        utt.audio = std::make_shared<Waveform>(render_utterance(voice, length, rng, o.f0_jitter));
        corpus.utterances.push_back(std::move(utt));
      }
    }
    for (int n = 0; n < o.noises_per_split; ++n) {
      Rng rng = Rng::derive(o.seed, part.stream * 1000 + 900, static_cast<std::uint64_t>(n));
      NoiseClip clip;
      clip.id = tag + "_noise" + padded(n, 2);
      clip.path = "wav/" + clip.id + ".wav";
      clip.split = part.split;
      const bool voiced = rng.uniform() < o.voiced_noise_fraction;
      clip.audio = std::make_shared<Waveform>(render_noise(6 * kSampleRate, rng, voiced));
      corpus.noises.push_back(std::move(clip));
    }
  }
  corpus.validate();
  return corpus;
}

Corpus synth_corpus(int n_speakers, int utterances_per_speaker, std::uint64_t seed) {
  SynthOptions o;
  o.train_speakers = n_speakers;
  o.utterances_per_speaker = utterances_per_speaker;
  o.seed = seed;
  return synth_corpus(o);
}

}  // namespace smdn

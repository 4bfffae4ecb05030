// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "smdn/errors.hpp"
#include "smdn/mixing.hpp"
#include "smdn/stft.hpp"
#include "smdn/synth.hpp"
#include "smdn/wav.hpp"

using namespace smdn;

namespace {

Waveform noise(Index n, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  Waveform x(n);
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

void put16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("smdn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("wav round trip and format rejection") {
  const Waveform x = quantize_pcm16(noise(1234, 1, 0.3));
  const auto bytes = encode_wav(x);
  CHECK(bytes.size() == 44 + 2 * 1234);
  CHECK(decode_wav(bytes) == x);

  Waveform loud(3);
  loud << 1.5, -2.0, 0.5;
  const Waveform clipped = decode_wav(encode_wav(loud));
  CHECK(clipped[0] == 32767.0 / 32768.0);
  CHECK(clipped[1] == -1.0);
  CHECK(clipped[2] == 0.5);

  auto stereo = bytes;
  put16(stereo, 22, 2);
  CHECK_THROWS_AS(decode_wav(stereo), FormatError);
  auto fast = bytes;
  put16(fast, 24, 16000 & 0xffff);
  CHECK_THROWS_AS(decode_wav(fast), FormatError);
  auto eight_bit = bytes;
  put16(eight_bit, 34, 8);
  CHECK_THROWS_AS(decode_wav(eight_bit), FormatError);
  auto float_fmt = bytes;
  put16(float_fmt, 20, 3);
  CHECK_THROWS_AS(decode_wav(float_fmt), FormatError);
  CHECK_THROWS_AS(decode_wav(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 100)), FormatError);
  CHECK_THROWS_AS(decode_wav(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 36)), FormatError);
  auto not_riff = bytes;
  not_riff[0] = 'X';
  CHECK_THROWS_AS(decode_wav(not_riff), FormatError);
}

TEST_CASE("mix gain examples") {
  const Waveform s = noise(kSegmentLength, 2);
  Waveform n = noise(kSegmentLength, 3);
  n *= std::sqrt(s.squaredNorm() / n.squaredNorm());
  CHECK(noise_gain(s, n, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(noise_gain(s, n, 10.0) == doctest::Approx(0.31622776601683794).epsilon(1e-12));
  CHECK(noise_gain(s, n, -5.0) == doctest::Approx(1.7782794100389228).epsilon(1e-12));
  CHECK_THROWS_AS(mix(Waveform::Zero(kSegmentLength), n, 0.0), SilentSegmentError);
  CHECK_THROWS_AS(mix(s, Waveform::Zero(kSegmentLength), 0.0), SilentSegmentError);
  CHECK_THROWS_AS(mix(s, Waveform(n.head(100)), 0.0), DimensionError);
}

TEST_CASE("mixtures hit the requested SNR and are exactly additive") {
  Rng rng(4);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double snr = rng.uniform(kMinSnrDb, kMaxSnrDb);
    const auto m = mix(noise(kSegmentLength, 10 + i, rng.uniform(0.01, 1.0)),
                       noise(kSegmentLength, 5000 + i, rng.uniform(0.01, 1.0)), snr);
    worst = std::max(worst, std::abs(measured_snr_db(m.clean, m.noise) - snr));
    CHECK((m.mixture - m.clean - m.noise).isZero(0.0));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("sample_segment examples") {
  Rng rng(5);
  const Waveform exact = noise(kSegmentLength, 6);
  CHECK(sample_segment(exact, rng) == exact);

  Waveform ramp(kSegmentLength + 1);
  for (Index i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  int zero = 0;
  int one = 0;
  for (int i = 0; i < 1000; ++i) {
    const double first = sample_segment(ramp, rng)[0];
    (first == 0.0 ? zero : one) += 1;
  }
  CHECK(zero >= 400);
  CHECK(zero <= 600);
  CHECK(one >= 400);
  CHECK(one <= 600);

  const Waveform short_noise = noise(10000, 7);
  const Waveform tiled = sample_segment(short_noise, rng);
  CHECK(tiled.size() == kSegmentLength);
  for (Index b = 0; b < 4; ++b) CHECK(tiled.segment(b * 10000, 10000) == short_noise);
  CHECK_THROWS_AS(sample_segment(Waveform(), rng), LengthError);
}

TEST_CASE("sample_pair balance and labels") {
  Corpus corpus;
  for (int s = 0; s < 4; ++s) {
    for (int u = 0; u < 3; ++u) {
      Utterance utt;
      utt.speaker = "s" + std::to_string(s);
      utt.id = utt.speaker + "u" + std::to_string(u);
      utt.audio = std::make_shared<Waveform>(noise(300, 100 + 10 * s + u));
      corpus.utterances.push_back(utt);
    }
  }
  NoiseClip clip;
  clip.id = "n0";
  clip.audio = std::make_shared<Waveform>(noise(500, 99));
  corpus.noises.push_back(clip);
  const auto pool = corpus.utterances_in(Split::kTrain);
  const auto noises = corpus.noises_in(Split::kTrain);

  Rng rng(8);
  int same = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = sample_pair(pool, noises, rng, 200);
    same += p.same;
    if (p.same) {
      CHECK(p.a.speaker_id == p.b.speaker_id);
      CHECK(p.a.utterance_id != p.b.utterance_id);
    } else {
      CHECK(p.a.speaker_id != p.b.speaker_id);
    }
  }
  CHECK(same >= 4800);
  CHECK(same <= 5200);

  std::vector<const Utterance*> one_speaker(pool.begin(), pool.begin() + 3);
  CHECK_THROWS_AS(sample_pair(one_speaker, noises, rng, 200), ConfigError);
}

TEST_CASE("synthetic voices peak at their fundamental") {
  Rng rng(9);
  const StftConfig cfg;
  for (const auto& [f0, bin] : {std::pair{100.0, Index{13}}, std::pair{250.0, Index{32}}}) {
    SpeakerVoice v;
    v.f0 = f0;
    v.resonance_hz = f0;
    const Waveform x = render_harmonic(v, f0, kSegmentLength, rng);
    const Eigen::VectorXd avg = stft(x, cfg).magnitude().rowwise().mean();
    Index peak = 0;
    avg.maxCoeff(&peak);
    CHECK(peak == bin);
  }
}

TEST_CASE("voiced noise clips") {
  for (const bool voiced : {false, true}) {
    Rng rng(21);
    const Waveform x = render_noise(6 * kSampleRate, rng, voiced);
    CHECK(std::sqrt(x.squaredNorm() / static_cast<double>(x.size())) == doctest::Approx(0.1).epsilon(1e-3));
  }
  Rng r1(21);
  Rng r2(21);
  CHECK(render_noise(kSegmentLength, r1, false) != render_noise(kSegmentLength, r2, true));

  // The fraction only touches noise clips.
  SynthOptions o;
  o.train_speakers = 2;
  o.val_speakers = 0;
  o.test_speakers = 0;
  o.utterances_per_speaker = 1;
  o.noises_per_split = 3;
  o.voiced_noise_fraction = 0.0;
  const Corpus plain = synth_corpus(o);
  o.voiced_noise_fraction = 1.0;
  const Corpus talkers = synth_corpus(o);
  for (std::size_t i = 0; i < plain.utterances.size(); ++i)
    CHECK(*plain.utterances[i].audio == *talkers.utterances[i].audio);
  for (std::size_t i = 0; i < plain.noises.size(); ++i) CHECK(*plain.noises[i].audio != *talkers.noises[i].audio);
}

TEST_CASE("synthetic corpus contract") {
  SynthOptions o;
  o.train_speakers = 4;
  o.val_speakers = 2;
  o.test_speakers = 2;
  o.utterances_per_speaker = 2;
  o.noises_per_split = 2;
  o.seed = 77;
  const Corpus a = synth_corpus(o);
  const Corpus b = synth_corpus(o);
  REQUIRE(a.utterances.size() == 16);
  for (std::size_t i = 0; i < a.utterances.size(); ++i) {
    CHECK(encode_wav(*a.utterances[i].audio) == encode_wav(*b.utterances[i].audio));
    CHECK(a.utterances[i].audio->size() >= kSegmentLength);
  }
  for (std::size_t i = 0; i < a.noises.size(); ++i) CHECK(*a.noises[i].audio == *b.noises[i].audio);

  const auto train_list = a.speakers(Split::kTrain);
  const std::set<std::string> train(train_list.begin(), train_list.end());
  for (const auto& s : a.speakers(Split::kTest)) CHECK(train.count(s) == 0);
  for (const auto& s : a.speakers(Split::kVal)) CHECK(train.count(s) == 0);
  const auto fam = a.families();
  int family_one = 0;
  for (const auto& s : train) family_one += fam.at(s);
  CHECK(family_one == 2);

  o.seed = 78;
  CHECK(*synth_corpus(o).utterances[0].audio != *a.utterances[0].audio);

  SUBCASE("save and reload") {
    const auto dir = scratch("corpus");
    save_corpus(a, dir.string());
    std::size_t excluded = 99;
    const Corpus c = load_corpus((dir / "utterances.jsonl").string(), (dir / "noises.jsonl").string(), &excluded);
    CHECK(excluded == 0);
    REQUIRE(c.utterances.size() == a.utterances.size());
    for (std::size_t i = 0; i < c.utterances.size(); ++i) {
      CHECK(c.utterances[i].id == a.utterances[i].id);
      CHECK(c.utterances[i].family == a.utterances[i].family);
      CHECK(*c.utterances[i].audio == *a.utterances[i].audio);
    }
    CHECK(c.noises.size() == a.noises.size());
    std::filesystem::remove_all(dir);
  }
  SUBCASE("short files are excluded, leaked speakers rejected") {
    Corpus bad = a;
    bad.utterances[0].audio = std::make_shared<Waveform>(Waveform::Zero(100));
    const auto dir = scratch("short");
    save_corpus(bad, dir.string());
    std::size_t excluded = 0;
    const Corpus c = load_corpus((dir / "utterances.jsonl").string(), (dir / "noises.jsonl").string(), &excluded);
    CHECK(excluded == 1);
    CHECK(c.utterances.size() == a.utterances.size() - 1);
    Corpus leak = a;
    leak.utterances.back().speaker = leak.utterances.front().speaker;
    CHECK_THROWS_AS(leak.validate(), ConfigError);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("hold-out keeps every speaker on both sides") {
    const auto split = hold_out(a, Split::kTrain, 0.2);
    CHECK(split.fit.size() == 4);
    CHECK(split.holdout.size() == 4);
  }
}

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_CORPUS_HPP_
#define SMDN_CORPUS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smdn/tensor.hpp"

namespace smdn {

/// Mixture length in samples (5 s at 8 kHz).
inline constexpr Index kSegmentLength = 40000;

enum class Split { kTrain, kVal, kTest };

std::string split_name(Split s);
Split parse_split(const std::string& name);

struct Utterance {
  std::string speaker;
  std::string id;
  std::string path;
  Split split = Split::kTrain;
  int family = -1;  // ground-truth group of synthetic speakers, -1 if unknown
  std::shared_ptr<const Waveform> audio;
};

struct NoiseClip {
  std::string id;
  std::string path;
  Split split = Split::kTrain;
  std::shared_ptr<const Waveform> audio;
};

struct Corpus {
  std::vector<Utterance> utterances;
  std::vector<NoiseClip> noises;

  std::vector<const Utterance*> utterances_in(Split s) const;
  std::vector<const NoiseClip*> noises_in(Split s) const;
  /// Sorted, de-duplicated speaker ids of a split.
  std::vector<std::string> speakers(Split s) const;
  /// Ground-truth family per speaker where known.
  std::map<std::string, int> families() const;

  /// Throws ConfigError when speaker or noise ids leak across splits, an
  /// utterance is shorter than kSegmentLength, or ids repeat.
  void validate() const;
};

/// Reads JSON-lines manifests and their WAV files. Relative paths resolve
/// against the manifest's directory. Utterances shorter than kSegmentLength
/// are dropped; the count of dropped files is written to `excluded`.
Corpus load_corpus(const std::string& utterance_manifest, const std::string& noise_manifest,
                   std::size_t* excluded = nullptr);

/// Writes <dir>/wav/*.wav plus utterances.jsonl and noises.jsonl.
void save_corpus(const Corpus& corpus, const std::string& dir);

/// Per-speaker split of one corpus split into fitting and held-out
/// utterances. The last `fraction` of each speaker's utterances (in id order,
/// at least one when the speaker has two or more) is held out.
struct HoldoutSplit {
  std::vector<const Utterance*> fit;
  std::vector<const Utterance*> holdout;
};
HoldoutSplit hold_out(const Corpus& corpus, Split s, double fraction);

}  // namespace smdn

#endif  // SMDN_CORPUS_HPP_

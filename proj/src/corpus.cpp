// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

#include "smdn/errors.hpp"
#include "smdn/wav.hpp"

namespace smdn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw FormatError("manifest: unknown split '" + name + "'");
}

std::vector<const Utterance*> Corpus::utterances_in(Split s) const {
  std::vector<const Utterance*> out;
  for (const auto& u : utterances) {
    if (u.split == s) out.push_back(&u);
  }
  return out;
}

std::vector<const NoiseClip*> Corpus::noises_in(Split s) const {
  std::vector<const NoiseClip*> out;
  for (const auto& n : noises) {
    if (n.split == s) out.push_back(&n);
  }
  return out;
}

std::vector<std::string> Corpus::speakers(Split s) const {
  std::set<std::string> ids;
  for (const auto& u : utterances) {
    if (u.split == s) ids.insert(u.speaker);
  }
  return {ids.begin(), ids.end()};
}

std::map<std::string, int> Corpus::families() const {
  std::map<std::string, int> out;
  for (const auto& u : utterances) {
    if (u.family >= 0) out[u.speaker] = u.family;
  }
  return out;
}

void Corpus::validate() const {
  std::map<std::string, Split> speaker_split;
  std::set<std::string> ids;
  for (const auto& u : utterances) {
    if (!u.audio) throw ConfigError("corpus: utterance " + u.id + " has no audio");
    if (u.audio->size() < kSegmentLength) throw ConfigError("corpus: utterance " + u.id + " shorter than 5 s");
    if (!ids.insert(u.id).second) throw ConfigError("corpus: duplicate utterance id " + u.id);
    const auto [it, fresh] = speaker_split.emplace(u.speaker, u.split);
    if (!fresh && it->second != u.split) throw ConfigError("corpus: speaker " + u.speaker + " appears in two splits");
  }
  std::set<std::string> noise_ids;
  for (const auto& n : noises) {
    if (!n.audio || n.audio->size() == 0) throw ConfigError("corpus: noise " + n.id + " is empty");
    if (!noise_ids.insert(n.id).second) throw ConfigError("corpus: noise " + n.id + " appears twice");
  }
}

namespace {

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("manifest: cannot open " + path);
  std::vector<json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError("manifest: " + path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (base / path).string();
}

std::string field(const json& row, const char* key, const std::string& where) {
  if (!row.contains(key) || !row[key].is_string()) throw FormatError(where + ": missing string field '" + key + "'");
  return row[key].get<std::string>();
}

}  // namespace

Corpus load_corpus(const std::string& utterance_manifest, const std::string& noise_manifest, std::size_t* excluded) {
  Corpus corpus;
  std::size_t dropped = 0;
  const fs::path ubase = fs::path(utterance_manifest).parent_path();
  for (const auto& row : read_jsonl(utterance_manifest)) {
    Utterance u;
    u.speaker = field(row, "speaker", utterance_manifest);
    u.id = field(row, "id", utterance_manifest);
    u.path = field(row, "path", utterance_manifest);
    u.split = parse_split(field(row, "split", utterance_manifest));
    if (row.contains("family")) u.family = row["family"].get<int>();
    auto audio = std::make_shared<Waveform>(read_wav(resolve(ubase, u.path)));
    if (audio->size() < kSegmentLength) {
      ++dropped;
      continue;
    }
    u.audio = std::move(audio);
    corpus.utterances.push_back(std::move(u));
  }
  const fs::path nbase = fs::path(noise_manifest).parent_path();
  for (const auto& row : read_jsonl(noise_manifest)) {
    NoiseClip n;
    n.id = field(row, "id", noise_manifest);
    n.path = field(row, "path", noise_manifest);
    n.split = parse_split(field(row, "split", noise_manifest));
    n.audio = std::make_shared<Waveform>(read_wav(resolve(nbase, n.path)));
    corpus.noises.push_back(std::move(n));
  }
  if (excluded) *excluded = dropped;
  corpus.validate();
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "wav");
  std::ofstream um(root / "utterances.jsonl");
  for (const auto& u : corpus.utterances) {
    const std::string rel = "wav/" + u.id + ".wav";
    write_wav((root / rel).string(), *u.audio);
    json row = {{"speaker", u.speaker}, {"id", u.id}, {"path", rel}, {"split", split_name(u.split)}};
    if (u.family >= 0) row["family"] = u.family;
    um << row.dump() << '\n';
  }
  std::ofstream nm(root / "noises.jsonl");
  for (const auto& n : corpus.noises) {
    const std::string rel = "wav/" + n.id + ".wav";
    write_wav((root / rel).string(), *n.audio);
    nm << json{{"id", n.id}, {"path", rel}, {"split", split_name(n.split)}}.dump() << '\n';
  }
  if (!um || !nm) throw ConfigError("corpus: cannot write manifests under " + dir);
}

HoldoutSplit hold_out(const Corpus& corpus, Split s, double fraction) {
  std::map<std::string, std::vector<const Utterance*>> by_speaker;
  for (const Utterance* u : corpus.utterances_in(s)) by_speaker[u->speaker].push_back(u);
  HoldoutSplit out;
  for (auto& [speaker, list] : by_speaker) {
    std::sort(list.begin(), list.end(), [](const Utterance* a, const Utterance* b) { return a->id < b->id; });
    std::size_t held = 0;
    if (list.size() >= 2) {
      held = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(list.size()))),
                                     1, list.size() - 1);
    }
    const std::size_t keep = list.size() - held;
    out.fit.insert(out.fit.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(keep));
    out.holdout.insert(out.holdout.end(), list.begin() + static_cast<std::ptrdiff_t>(keep), list.end());
  }
  return out;
}

}  // namespace smdn

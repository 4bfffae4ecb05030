// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "smdn/hashing.hpp"

namespace smdn {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  s = s.substr(first, s.find_last_not_of(" \t") - first + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("config: " + key + " expects a number, got '" + text + "'");
  }
  return v;
}

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<int> parse_list(const std::string& key, std::string text) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError("config: " + key + " has an unterminated list");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
  if (out.empty()) throw ConfigError("config: " + key + " is empty");
  return out;
}

struct Key {
  std::string name;  // section.key
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T, typename Access>
Key number_key(std::string name, Access access) {
  Key k;
  k.name = name;
  k.get = [access](const RunConfig& c) {
    const T v = access(const_cast<RunConfig&>(c));
    if constexpr (std::is_floating_point_v<T>) {
      return format(v);
    } else {
      return std::to_string(v);
    }
  };
  k.set = [access, name](RunConfig& c, const std::string& text) { access(c) = parse_number<T>(name, text); };
  return k;
}

template <typename Access>
Key string_key(std::string name, Access access) {
  return {name, [access](const RunConfig& c) { return access(const_cast<RunConfig&>(c)); },
          [access](RunConfig& c, const std::string& text) { access(c) = text; }};
}

void budget_keys(std::vector<Key>& keys, const std::string& section, const std::string& stem,
                 StageBudget RunConfig::*member) {
  const std::string p = section + "." + (stem.empty() ? "" : stem + "_");
  keys.push_back(number_key<int>(p + "steps", [member](RunConfig& c) -> int& { return (c.*member).steps; }));
  keys.push_back(number_key<int>(p + "batch", [member](RunConfig& c) -> int& { return (c.*member).batch; }));
  keys.push_back(number_key<double>(p + "learning_rate",
                                    [member](RunConfig& c) -> double& { return (c.*member).learning_rate; }));
  keys.push_back(number_key<int>(p + "eval_every", [member](RunConfig& c) -> int& { return (c.*member).eval_every; }));
  keys.push_back(number_key<int>(p + "patience", [member](RunConfig& c) -> int& { return (c.*member).patience; }));
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(string_key("run.name", [](RunConfig& c) -> std::string& { return c.name; }));
    k.push_back(number_key<std::uint64_t>("run.seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));

    k.push_back(string_key("data.utterance_manifest", [](RunConfig& c) -> std::string& { return c.utterance_manifest; }));
    k.push_back(string_key("data.noise_manifest", [](RunConfig& c) -> std::string& { return c.noise_manifest; }));
    k.push_back(number_key<int>("data.train_speakers", [](RunConfig& c) -> int& { return c.synth.train_speakers; }));
    k.push_back(number_key<int>("data.val_speakers", [](RunConfig& c) -> int& { return c.synth.val_speakers; }));
    k.push_back(number_key<int>("data.test_speakers", [](RunConfig& c) -> int& { return c.synth.test_speakers; }));
    k.push_back(number_key<int>("data.utterances_per_speaker",
                                [](RunConfig& c) -> int& { return c.synth.utterances_per_speaker; }));
    k.push_back(number_key<int>("data.families", [](RunConfig& c) -> int& { return c.synth.families; }));
    k.push_back(number_key<double>("data.family_spread", [](RunConfig& c) -> double& { return c.synth.family_spread; }));
    k.push_back(number_key<double>("data.f0_jitter", [](RunConfig& c) -> double& { return c.synth.f0_jitter; }));
    k.push_back(number_key<double>("data.voiced_noise_fraction",
                                   [](RunConfig& c) -> double& { return c.synth.voiced_noise_fraction; }));
    k.push_back(number_key<int>("data.noises_per_split", [](RunConfig& c) -> int& { return c.synth.noises_per_split; }));
    k.push_back(number_key<std::uint64_t>("data.synth_seed", [](RunConfig& c) -> std::uint64_t& { return c.synth.seed; }));
    k.push_back(number_key<double>("data.holdout_fraction", [](RunConfig& c) -> double& { return c.holdout_fraction; }));

    k.push_back(number_key<Index>("dsp.frame_size", [](RunConfig& c) -> Index& { return c.stft.frame_size; }));
    k.push_back(number_key<Index>("dsp.hop", [](RunConfig& c) -> Index& { return c.stft.hop; }));
    k.push_back(number_key<int>("dsp.sample_rate", [](RunConfig& c) -> int& { return c.stft.sample_rate; }));

    budget_keys(k, "embedding", "", &RunConfig::embedding);
    k.push_back(number_key<int>("embedding.validation_pairs", [](RunConfig& c) -> int& { return c.sv_validation_pairs; }));

    k.push_back(number_key<int>("clustering.k", [](RunConfig& c) -> int& { return c.k; }));
    k.push_back(number_key<int>("clustering.renderings", [](RunConfig& c) -> int& { return c.renderings; }));
    k.push_back(number_key<int>("clustering.restarts", [](RunConfig& c) -> int& { return c.restarts; }));

    k.push_back({"enhancer.hidden",
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.hidden.size(); ++i) s += (i ? "," : "") + std::to_string(c.hidden[i]);
                   return s;
                 },
                 [](RunConfig& c, const std::string& text) { c.hidden = parse_list("enhancer.hidden", text); }});
    budget_keys(k, "enhancer", "", &RunConfig::enhancer);
    k.push_back(number_key<int>("enhancer.validation_mixtures", [](RunConfig& c) -> int& { return c.denoise_validation; }));

    budget_keys(k, "ensemble", "gate", &RunConfig::gate);
    budget_keys(k, "ensemble", "finetune", &RunConfig::finetune);
    k.push_back(number_key<double>("ensemble.lambda", [](RunConfig& c) -> double& { return c.lambda; }));
    k.push_back(number_key<int>("ensemble.gate_validation", [](RunConfig& c) -> int& { return c.gate_validation; }));

    k.push_back(number_key<int>("eval.uniform", [](RunConfig& c) -> int& { return c.eval_uniform; }));
    k.push_back(number_key<int>("eval.per_snr", [](RunConfig& c) -> int& { return c.eval_per_snr; }));
    return k;
  }();
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& k : keys()) {
    if (k.name == name) return k;
  }
  throw ConfigError("config: unknown key " + name);
}

}  // namespace

TrainOptions StageBudget::options(std::uint64_t seed) const {
  TrainOptions o;
  o.steps = steps;
  o.batch = batch;
  o.learning_rate = learning_rate;
  o.eval_every = eval_every;
  o.patience = patience;
  o.seed = seed;
  return o;
}

std::string RunConfig::run_dir() const { return out.empty() ? "runs/" + name : out; }

std::string RunConfig::canonical() const {
  std::string text;
  for (const auto& k : keys()) text += k.name + "=" + k.get(*this) + "\n";
  return text;
}

std::string RunConfig::hash() const { return content_hash(canonical()); }

RunConfig parse_config(const std::string& text, RunConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key outside a section: " + section);
    for (const auto& [key, value] : body) {
      find_key(section + "." + key).set(base, trim(value.data()));
    }
  }
  return base;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: override needs key=value: " + assignment);
  find_key(trim(assignment.substr(0, eq))).set(config, trim(assignment.substr(eq + 1)));
}

void validate_config(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  need(!c.name.empty() && c.name.find('/') == std::string::npos, "run.name must be a plain name");
  need(c.utterance_manifest.empty() == c.noise_manifest.empty(), "set both manifests or neither");
  need(c.synth.train_speakers >= 2 && c.synth.val_speakers >= 1 && c.synth.test_speakers >= 1,
       "speaker counts too small");
  need(c.synth.utterances_per_speaker >= 2, "data.utterances_per_speaker must be at least 2");
  need(c.synth.families >= 1 && c.synth.noises_per_split >= 1, "families and noises must be positive");
  need(c.synth.family_spread > 0.0 && c.synth.family_spread <= 1.0, "data.family_spread must lie in (0, 1]");
  need(c.synth.f0_jitter >= 0.0 && c.synth.f0_jitter < 0.5, "data.f0_jitter must lie in [0, 0.5)");
  need(c.synth.voiced_noise_fraction >= 0.0 && c.synth.voiced_noise_fraction <= 1.0,
       "data.voiced_noise_fraction must lie in [0, 1]");
  need(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0, "data.holdout_fraction must lie in (0, 1)");
  need(c.stft.frame_size > 0 && c.stft.hop > 0 && c.stft.frame_size % c.stft.hop == 0, "bad dsp frame/hop");
  need(c.k >= 2, "clustering.k must be at least 2");
  need(c.renderings >= 1 && c.restarts >= 1, "clustering counts must be positive");
  for (int h : c.hidden) need(h >= 1, "enhancer.hidden entries must be positive");
  for (const StageBudget* b : {&c.embedding, &c.enhancer, &c.gate, &c.finetune}) {
    need(b->steps >= 0 && b->batch >= 1 && b->eval_every >= 1 && b->patience >= 1 && b->learning_rate > 0.0,
         "bad training budget");
  }
  need(c.lambda > 0.0, "ensemble.lambda must be positive");
  need(c.sv_validation_pairs >= 1 && c.denoise_validation >= 1 && c.gate_validation >= 1, "empty validation sets");
  need(c.eval_uniform >= 0 && c.eval_per_snr >= 0 && c.eval_uniform + c.eval_per_snr > 0, "empty test set");
}

}  // namespace smdn

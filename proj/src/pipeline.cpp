// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "smdn/checkpoint.hpp"
#include "smdn/evaluate.hpp"
#include "smdn/hashing.hpp"
#include "smdn/property_suite.hpp"

namespace smdn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream tags for per-stage seeds.
enum : std::uint64_t {
  kSeedSv = 1,
  kSeedSvValidation,
  kSeedSvHeldout,
  kSeedRenderings,
  kSeedKmeans,
  kSeedGate,
  kSeedGateValidation,
  kSeedGateHeldout,
  kSeedSpecialist,
  kSeedBaseline,
  kSeedDenoiseValidation,
  kSeedFinetune,
  kSeedTest,
  kSeedTestRenderings,
};

std::uint64_t stage_seed(const RunConfig& c, std::uint64_t tag, std::uint64_t index = 0) {
  return Rng::derive(c.seed, tag, index).next();
}

fs::path run_path(const RunConfig& c, const std::string& sub) { return fs::path(c.run_dir()) / sub; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write " + path.string());
}

std::string rel(const RunConfig& c, const std::string& path) {
  return fs::path(path).lexically_relative(c.run_dir()).generic_string();
}

std::vector<int> labels_for(const ClusterModel& clusters, const std::vector<Prepared>& set) {
  std::vector<int> out;
  for (const auto& p : set) out.push_back(clusters.label_of(p.speaker));
  return out;
}

std::vector<const Utterance*> of_cluster(const std::vector<const Utterance*>& pool, const ClusterModel& clusters,
                                         int k) {
  std::vector<const Utterance*> out;
  for (const Utterance* u : pool) {
    if (clusters.label_of(u->speaker) == k) out.push_back(u);
  }
  return out;
}

/// One stage invocation: logging, prerequisite checks and artifact metadata.
class Stage {
 public:
  Stage(std::string name, const RunConfig& config, const PipelineOptions& options)
      : name_(std::move(name)), c_(config), o_(options) {
    validate_config(c_);
    c_.stft.validate();
    for (const char* sub : {"corpus", "checkpoints", "clusters", "reports", "logs"}) {
      fs::create_directories(run_path(c_, sub));
    }
    log_.open(run_path(c_, "logs") / (name_ + ".log"), std::ios::binary | std::ios::trunc);
    log_ << "# " << name_ << "\n# config " << c_.hash() << "\n" << c_.canonical();
  }

  const RunConfig& config() const { return c_; }

  void log(const std::string& line) {
    log_ << line << "\n";
    log_.flush();
    if (o_.console) *o_.console << name_ << ": " << line << std::endl;
  }

  LogSink sink(const std::string& prefix) {
    return [this, prefix](const std::string& line) { log(prefix + line); };
  }

  void require(const std::string& path, const std::string& what, const std::string& stage) const {
    if (!fs::exists(path)) {
      throw ConfigError(name_ + " requires " + what + " (" + path + "); run `smdn " + stage + "` first");
    }
  }

  json read_meta(const std::string& artifact) const { return json::parse(read_text(meta_path(artifact))); }

  void write_meta(const std::string& artifact, json extra) {
    extra["stage"] = name_;
    extra["config_hash"] = c_.hash();
    extra["content_hash"] = file_content_hash(artifact);
    write_text(meta_path(artifact), extra.dump(2) + "\n");
    log("wrote " + rel(c_, artifact) + " " + extra["content_hash"].get<std::string>());
  }

  Corpus corpus() const {
    Corpus corpus;
    if (!c_.utterance_manifest.empty()) {
      corpus = load_corpus(c_.utterance_manifest, c_.noise_manifest);
    } else {
      const fs::path dir = run_path(c_, "corpus");
      require((dir / "utterances.jsonl").string(), "a corpus", "synth-data");
      corpus = load_corpus((dir / "utterances.jsonl").string(), (dir / "noises.jsonl").string());
    }
    corpus.validate();
    return corpus;
  }

  EmbedNet<Real> embed_net() const {
    const std::string path = embed_checkpoint_path(c_);
    require(path, "embed checkpoint", "train-sv");
    EmbedNet<Real> f;
    load_checkpoint(path).load_net(f, "embed.");
    return f;
  }

  ClusterModel clusters() const {
    const std::string path = cluster_model_path(c_);
    require(path, "a cluster model", "cluster");
    return load_cluster_model(path);
  }

  DenoiseSetup denoise_setup(const Corpus& corpus, const std::vector<const Utterance*>& fit,
                             const std::vector<const Utterance*>& holdout, std::uint64_t validation_seed) const {
    DenoiseSetup s;
    s.pool = fit;
    s.noises = corpus.noises_in(Split::kTrain);
    s.validation = fixed_mixtures(holdout, corpus.noises_in(Split::kVal), c_.denoise_validation, validation_seed, c_.stft);
    return s;
  }

 private:
  std::string name_;
  RunConfig c_;
  PipelineOptions o_;
  std::ofstream log_;
};

json train_json(const TrainResult& r) {
  return {{"best_validation", r.best_validation},
          {"best_step", r.best_step},
          {"steps_run", r.steps_run},
          {"stopped_early", r.stopped_early}};
}

template <typename Net>
void save_net(const std::string& path, const Net& net, const std::string& prefix) {
  ParamStore store;
  store.add_net(net, prefix);
  save_checkpoint(path, store);
}

void synth_data(Stage& st) {
  const RunConfig& c = st.config();
  if (!c.utterance_manifest.empty()) {
    const Corpus corpus = st.corpus();
    st.log("external corpus: " + std::to_string(corpus.utterances.size()) + " utterances, " +
           std::to_string(corpus.noises.size()) + " noise clips");
    return;
  }
  const Corpus corpus = synth_corpus(c.synth);
  const fs::path dir = run_path(c, "corpus");
  save_corpus(corpus, dir.string());
  st.log("synthesized " + std::to_string(corpus.utterances.size()) + " utterances, " +
         std::to_string(corpus.noises.size()) + " noise clips");
  st.write_meta((dir / "utterances.jsonl").string(), {{"utterances", corpus.utterances.size()}});
  st.write_meta((dir / "noises.jsonl").string(), {{"noises", corpus.noises.size()}});
}

void train_sv_stage(Stage& st) {
  const RunConfig& c = st.config();
  const Corpus corpus = st.corpus();
  const HoldoutSplit ho = hold_out(corpus, Split::kTrain, c.holdout_fraction);
  SvSetup setup;
  setup.pool = ho.fit;
  setup.noises = corpus.noises_in(Split::kTrain);
  setup.validation =
      fixed_pairs(ho.holdout, corpus.noises_in(Split::kVal), c.sv_validation_pairs, stage_seed(c, kSeedSvValidation), c.stft);
  TrainResult r;
  const EmbedNet<Real> f = train_sv(setup, c.embedding.options(stage_seed(c, kSeedSv)), c.stft, &r, st.sink(""));
  const auto heldout =
      fixed_pairs(ho.holdout, corpus.noises_in(Split::kTest), c.sv_validation_pairs, stage_seed(c, kSeedSvHeldout), c.stft);
  const double acc = pair_accuracy(f, heldout);
  st.log("held-out pair accuracy " + std::to_string(acc));
  const std::string path = embed_checkpoint_path(c);
  save_net(path, f, "embed.");
  json meta = train_json(r);
  meta["heldout_accuracy"] = acc;
  st.write_meta(path, meta);
}

void cluster_stage(Stage& st) {
  const RunConfig& c = st.config();
  const EmbedNet<Real> f = st.embed_net();
  const Corpus corpus = st.corpus();
  const auto emb = embed_speakers(f, corpus.utterances_in(Split::kTrain), corpus.noises_in(Split::kTrain),
                                  c.renderings, stage_seed(c, kSeedRenderings), c.stft);
  const SpeakerMeans means = speaker_means(emb);
  KMeansOptions ko;
  ko.restarts = c.restarts;
  ko.seed = stage_seed(c, kSeedKmeans);
  const KMeansResult km = kmeans(means.means, c.k, ko);
  const ClusterModel model = make_cluster_model(means, km, file_content_hash(embed_checkpoint_path(c)));
  const std::string path = cluster_model_path(c);
  save_cluster_model(model, path);

  json meta = {{"objective", km.objective}, {"speakers", means.speakers.size()}};
  const auto families = corpus.families();
  std::vector<int> truth;
  for (const auto& s : means.speakers) {
    const auto it = families.find(s);
    if (it == families.end() || it->second < 0) break;
    truth.push_back(it->second);
  }
  for (std::size_t i = 0; i < means.speakers.size(); ++i) {
    st.log(means.speakers[i] + " -> " + std::to_string(km.labels[i]));
  }
  if (truth.size() == means.speakers.size()) {
    const int families_k = *std::max_element(truth.begin(), truth.end()) + 1;
    if (families_k == c.k) {
      const int agree = matched_agreement(km.labels, truth, c.k);
      meta["family_agreement"] = agree;
      st.log("family agreement " + std::to_string(agree) + "/" + std::to_string(truth.size()));
    }
  }
  meta["embed_checkpoint_hash"] = model.sv_checkpoint_hash;
  st.write_meta(path, meta);
}

void pretrain_gate_stage(Stage& st) {
  const RunConfig& c = st.config();
  const EmbedNet<Real> f = st.embed_net();
  const ClusterModel clusters = st.clusters();
  const Corpus corpus = st.corpus();
  const HoldoutSplit ho = hold_out(corpus, Split::kTrain, c.holdout_fraction);
  LabeledSetup setup;
  setup.pool = ho.fit;
  setup.noises = corpus.noises_in(Split::kTrain);
  setup.validation =
      fixed_mixtures(ho.holdout, corpus.noises_in(Split::kVal), c.gate_validation, stage_seed(c, kSeedGateValidation), c.stft);
  setup.validation_labels = labels_for(clusters, setup.validation);
  TrainResult r;
  const GateNet<Real> g = pretrain_gate(f, clusters, setup, c.gate.options(stage_seed(c, kSeedGate)), c.stft, &r, st.sink(""));
  const auto heldout =
      fixed_mixtures(ho.holdout, corpus.noises_in(Split::kTest), c.gate_validation, stage_seed(c, kSeedGateHeldout), c.stft);
  const double acc = gate_accuracy(g, heldout, labels_for(clusters, heldout));
  st.log("held-out gate accuracy " + std::to_string(acc));
  const std::string path = gate_checkpoint_path(c);
  save_net(path, g, "gate.");
  json meta = train_json(r);
  meta["heldout_accuracy"] = acc;
  st.write_meta(path, meta);
}

void pretrain_specialists_stage(Stage& st) {
  const RunConfig& c = st.config();
  const ClusterModel clusters = st.clusters();
  const Corpus corpus = st.corpus();
  const HoldoutSplit ho = hold_out(corpus, Split::kTrain, c.holdout_fraction);
  for (int h : c.hidden) {
    for (int k = 0; k < clusters.k; ++k) {
      const auto fit = of_cluster(ho.fit, clusters, k);
      if (fit.empty()) throw ConfigError("pretrain-specialists: cluster " + std::to_string(k) + " is empty");
      const DenoiseSetup setup =
          st.denoise_setup(corpus, fit, of_cluster(ho.holdout, clusters, k), stage_seed(c, kSeedDenoiseValidation, 1 + k));
      const std::uint64_t seed = stage_seed(c, kSeedSpecialist, static_cast<std::uint64_t>(h) * 1000 + k);
      Rng init = Rng::derive(seed, 0);
      TrainResult r;
      const DenoiseNet<Real> net =
          train_denoiser(DenoiseNet<Real>::uniform(c.stft.bins(), h, init), setup, c.enhancer.options(seed), c.stft,
                         &r, st.sink("h" + std::to_string(h) + " spec" + std::to_string(k) + " "));
      const std::string path = specialist_checkpoint_path(c, h, k);
      save_net(path, net, "spec" + std::to_string(k) + ".");
      st.write_meta(path, train_json(r));
    }
  }
}

void train_baseline_stage(Stage& st) {
  const RunConfig& c = st.config();
  const Corpus corpus = st.corpus();
  const HoldoutSplit ho = hold_out(corpus, Split::kTrain, c.holdout_fraction);
  const DenoiseSetup setup = st.denoise_setup(corpus, ho.fit, ho.holdout, stage_seed(c, kSeedDenoiseValidation));
  for (int h : c.hidden) {
    const std::uint64_t seed = stage_seed(c, kSeedBaseline, static_cast<std::uint64_t>(h));
    Rng init = Rng::derive(seed, 0);
    TrainResult r;
    const DenoiseNet<Real> net = train_denoiser(DenoiseNet<Real>::uniform(c.stft.bins(), h, init), setup,
                                                c.enhancer.options(seed), c.stft, &r, st.sink("h" + std::to_string(h) + " "));
    const std::string path = baseline_checkpoint_path(c, h);
    save_net(path, net, "baseline.");
    st.write_meta(path, train_json(r));
  }
}

struct LoadedEnsemble {
  EnsembleNet<Real> model;
  double lambda = kFinetuneLambda;
  std::vector<std::string> artifacts;
};

void write_manifest(Stage& st, const std::string& mode, int hidden, const std::string& gate,
                    const std::vector<std::string>& specialists) {
  const RunConfig& c = st.config();
  json specs = json::array();
  for (const auto& s : specialists) specs.push_back(rel(c, s));
  const json manifest = {{"K", specialists.size()},
                         {"lambda", c.lambda},
                         {"hidden", hidden},
                         {"gate_checkpoint", rel(c, gate)},
                         {"specialist_checkpoints", specs},
                         {"cluster_model", rel(c, cluster_model_path(c))},
                         {"mode", mode},
                         {"config_hash", c.hash()}};
  const std::string path = ensemble_manifest_path(c, mode, hidden);
  write_text(path, manifest.dump(2) + "\n");
  st.log("wrote " + rel(c, path));
}

LoadedEnsemble load_ensemble(const Stage& st, const std::string& manifest_path, const std::string& producer) {
  const RunConfig& c = st.config();
  st.require(manifest_path, "an ensemble manifest", producer);
  const json m = json::parse(read_text(manifest_path));
  LoadedEnsemble out;
  out.lambda = m.at("lambda").get<double>();
  const fs::path root(c.run_dir());
  const std::string gate = (root / m.at("gate_checkpoint").get<std::string>()).string();
  st.require(gate, "a gate checkpoint", "pretrain-gate");
  load_checkpoint(gate).load_net(out.model.gate, "gate.");
  out.artifacts.push_back(gate);
  const auto& specs = m.at("specialist_checkpoints");
  if (m.at("K").get<std::size_t>() != specs.size() ||
      static_cast<std::size_t>(out.model.gate.clusters()) != specs.size()) {
    throw FormatError("ensemble manifest " + manifest_path + ": checkpoint/manifest mismatch");
  }
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const std::string path = (root / specs[k].get<std::string>()).string();
    st.require(path, "a specialist checkpoint", "pretrain-specialists");
    DenoiseNet<Real> spec;
    load_checkpoint(path).load_net(spec, "spec" + std::to_string(k) + ".");
    out.model.specialists.push_back(std::move(spec));
    out.artifacts.push_back(path);
  }
  out.model.validate();
  return out;
}

void naive_manifests(Stage& st) {
  const RunConfig& c = st.config();
  for (int h : c.hidden) {
    std::vector<std::string> specs;
    for (int k = 0; k < c.k; ++k) {
      specs.push_back(specialist_checkpoint_path(c, h, k));
      st.require(specs.back(), "specialist checkpoints", "pretrain-specialists");
    }
    st.require(gate_checkpoint_path(c), "a gate checkpoint", "pretrain-gate");
    write_manifest(st, "naive", h, gate_checkpoint_path(c), specs);
  }
}

void finetune_stage(Stage& st) {
  const RunConfig& c = st.config();
  naive_manifests(st);
  const Corpus corpus = st.corpus();
  const HoldoutSplit ho = hold_out(corpus, Split::kTrain, c.holdout_fraction);
  const DenoiseSetup setup = st.denoise_setup(corpus, ho.fit, ho.holdout, stage_seed(c, kSeedDenoiseValidation));
  for (int h : c.hidden) {
    LoadedEnsemble naive = load_ensemble(st, ensemble_manifest_path(c, "naive", h), "finetune");
    const std::uint64_t seed = stage_seed(c, kSeedFinetune, static_cast<std::uint64_t>(h));
    TrainResult r;
    const EnsembleNet<Real> tuned = finetune(naive.model, setup, c.finetune.options(seed), c.stft, c.lambda, &r,
                                             st.sink("h" + std::to_string(h) + " "));
    const std::string gate = finetuned_checkpoint_path(c, h, "gate");
    save_net(gate, tuned.gate, "gate.");
    st.write_meta(gate, train_json(r));
    std::vector<std::string> specs;
    for (int k = 0; k < c.k; ++k) {
      specs.push_back(finetuned_checkpoint_path(c, h, "spec" + std::to_string(k)));
      save_net(specs.back(), tuned.specialists[static_cast<std::size_t>(k)], "spec" + std::to_string(k) + ".");
      st.write_meta(specs.back(), train_json(r));
    }
    write_manifest(st, "finetuned", h, gate, specs);
  }
}

std::string config_hash_of(const Stage& st, const std::string& artifact) {
  st.require(meta_path(artifact), "artifact metadata", "the producing stage");
  return st.read_meta(artifact).at("config_hash").get<std::string>();
}

void evaluate_stage(Stage& st, bool force) {
  const RunConfig& c = st.config();
  const EmbedNet<Real> f = st.embed_net();
  const ClusterModel clusters = st.clusters();

  std::vector<std::string> artifacts = {embed_checkpoint_path(c), cluster_model_path(c)};
  struct Model {
    std::string name;
    int hidden;
    std::optional<DenoiseNet<Real>> single;
    std::optional<LoadedEnsemble> ensemble;
  };
  std::vector<Model> models;
  for (int h : c.hidden) {
    const std::string base = baseline_checkpoint_path(c, h);
    st.require(base, "a baseline checkpoint", "train-baseline");
    DenoiseNet<Real> net;
    load_checkpoint(base).load_net(net, "baseline.");
    artifacts.push_back(base);
    models.push_back({"baseline_h" + std::to_string(h), h, net, std::nullopt});
    for (const std::string mode : {"naive", "finetuned"}) {
      LoadedEnsemble e = load_ensemble(st, ensemble_manifest_path(c, mode, h), "finetune");
      if (e.model.clusters() != clusters.k) throw FormatError("evaluate: ensemble K differs from the cluster model");
      artifacts.insert(artifacts.end(), e.artifacts.begin(), e.artifacts.end());
      models.push_back({mode + "_k" + std::to_string(c.k) + "_h" + std::to_string(h), h, std::nullopt, std::move(e)});
    }
  }

  std::map<std::string, std::vector<std::string>> by_hash;
  for (const auto& a : artifacts) by_hash[config_hash_of(st, a)].push_back(rel(c, a));
  if (by_hash.size() > 1) {
    std::string detail;
    for (const auto& [hash, names] : by_hash) detail += "\n  " + hash.substr(0, 12) + ": " + names.front() + " ...";
    if (!force) {
      throw ConfigError("evaluate: artifacts were produced by different configs; rerun the stages or pass --force" +
                        detail);
    }
    st.log("warning: mixed config hashes accepted by --force" + detail);
  }

  const Corpus corpus = st.corpus();
  const auto test_utts = corpus.utterances_in(Split::kTest);
  const auto test_noises = corpus.noises_in(Split::kTest);
  const TestSet set = make_test_set(test_utts, test_noises, c.eval_uniform, c.eval_per_snr, stage_seed(c, kSeedTest), c.stft);
  const auto reference = nearest_centroid_labels(
      embed_speakers(f, test_utts, test_noises, c.renderings, stage_seed(c, kSeedTestRenderings), c.stft), clusters);

  EvalReport report;
  for (const auto& m : models) {
    const EvalReport part = m.single ? evaluate_denoiser(m.name, *m.single, set)
                                     : evaluate_ensemble(m.name, m.ensemble->model, set, reference, m.ensemble->lambda);
    const ModelSummary& s = part.summaries.front();
    std::ostringstream line;
    line << std::fixed << std::setprecision(3) << m.name << " mean SI-SDRi " << s.mean_sisdri << " dB";
    if (s.gate_accuracy >= 0.0) line << ", gate accuracy " << s.gate_accuracy;
    st.log(line.str());
    report.append(part);
  }
  const std::string dir = reports_dir(c);
  emit_report(report, dir);
  for (const char* file : {"records.csv", "summary.csv", "summary.json"}) {
    st.write_meta((fs::path(dir) / file).string(), {{"rows", file == std::string("records.csv")
                                                                  ? report.records.size()
                                                                  : report.summaries.size()}});
  }
}

void report_stage(Stage& st) {
  const RunConfig& c = st.config();
  const fs::path dir(reports_dir(c));
  st.require((dir / "summary.csv").string(), "evaluation reports", "evaluate");
  const auto summaries = parse_summary_csv(read_text(dir / "summary.csv"));
  const auto records = parse_records_csv(read_text(dir / "records.csv"));

  std::ostringstream out;
  out << std::fixed;
  out << std::left << std::setw(22) << "model" << std::right << std::setw(4) << "K" << std::setw(6) << "H"
      << std::setw(12) << "total" << std::setw(12) << "effective" << std::setw(10) << "SI-SDRi" << std::setw(8)
      << "gate" << "\n";
  for (const auto& s : summaries) {
    out << std::left << std::setw(22) << s.model << std::right << std::setw(4) << s.k << std::setw(6) << s.hidden
        << std::setw(12) << s.total_params << std::setw(12) << s.effective_params << std::setw(10)
        << std::setprecision(3) << s.mean_sisdri << std::setw(8) << std::setprecision(2);
    if (s.gate_accuracy >= 0.0) {
      out << s.gate_accuracy;
    } else {
      out << "-";
    }
    out << "\n";
  }
  out << "\nmean SI-SDRi by stratum\n";
  std::map<std::string, std::map<std::string, std::pair<double, int>>> strata;
  for (const auto& r : records) {
    auto& cell = strata[r.model][r.stratum];
    cell.first += r.sisdri;
    ++cell.second;
  }
  for (const auto& s : summaries) {
    out << std::left << std::setw(22) << s.model << std::right;
    for (const auto& [name, cell] : strata[s.model]) {
      out << "  " << name << " " << std::setprecision(3) << cell.first / cell.second;
    }
    out << "\n";
  }
  write_text(dir / "report.txt", out.str());
  st.log("\n" + out.str());
}

}  // namespace

std::string embed_checkpoint_path(const RunConfig& c) { return (run_path(c, "checkpoints") / "embed.ckpt").string(); }

std::string cluster_model_path(const RunConfig& c) {
  return (run_path(c, "clusters") / ("k" + std::to_string(c.k) + ".json")).string();
}

std::string gate_checkpoint_path(const RunConfig& c) {
  return (run_path(c, "checkpoints") / ("gate_k" + std::to_string(c.k) + ".ckpt")).string();
}

std::string specialist_checkpoint_path(const RunConfig& c, int hidden, int k) {
  return (run_path(c, "checkpoints") /
          ("spec_k" + std::to_string(c.k) + "_h" + std::to_string(hidden) + "_" + std::to_string(k) + ".ckpt"))
      .string();
}

std::string baseline_checkpoint_path(const RunConfig& c, int hidden) {
  return (run_path(c, "checkpoints") / ("baseline_h" + std::to_string(hidden) + ".ckpt")).string();
}

std::string finetuned_checkpoint_path(const RunConfig& c, int hidden, const std::string& component) {
  return (run_path(c, "checkpoints") /
          ("finetuned_k" + std::to_string(c.k) + "_h" + std::to_string(hidden) + "_" + component + ".ckpt"))
      .string();
}

std::string ensemble_manifest_path(const RunConfig& c, const std::string& mode, int hidden) {
  return (run_path(c, "clusters") /
          ("ensemble_" + mode + "_k" + std::to_string(c.k) + "_h" + std::to_string(hidden) + ".json"))
      .string();
}

std::string reports_dir(const RunConfig& c) { return run_path(c, "reports").string(); }

std::string meta_path(const std::string& artifact) { return artifact + ".meta.json"; }

int run_stage(const std::string& subcommand, const RunConfig& config, const PipelineOptions& options) {
  if (subcommand == "selftest") {
    const SuiteResult r = run_suite(options.selftest_filter, options.console);
    return r.failures() == 0 ? 0 : 1;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
    throw ConfigError("unknown subcommand " + subcommand);
  }
  Stage st(subcommand, config, options);
  if (subcommand == "synth-data") synth_data(st);
  if (subcommand == "train-sv") train_sv_stage(st);
  if (subcommand == "cluster") cluster_stage(st);
  if (subcommand == "pretrain-gate") pretrain_gate_stage(st);
  if (subcommand == "pretrain-specialists") pretrain_specialists_stage(st);
  if (subcommand == "train-baseline") train_baseline_stage(st);
  if (subcommand == "finetune") finetune_stage(st);
  if (subcommand == "evaluate") evaluate_stage(st, options.force);
  if (subcommand == "report") report_stage(st);
  return 0;
}

void run_all(const RunConfig& config, const PipelineOptions& options) {
  for (const auto& s : kSubcommands) {
    if (s != "selftest") run_stage(s, config, options);
  }
}

}  // namespace smdn

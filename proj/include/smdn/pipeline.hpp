// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Stage orchestration over a run directory:
//
//   <run>/corpus/        synthesized WAVs and manifests
//   <run>/checkpoints/   *.ckpt plus a *.meta.json sidecar each
//   <run>/clusters/      k<K>.json cluster models and ensemble manifests
//   <run>/reports/       records.csv, summary.csv, summary.json
//   <run>/logs/          one log per stage: config, hashes, training trace
//
// Every sidecar records the hash of the config that produced it. Nothing
// written here carries a timestamp, so reruns are byte-identical.

#ifndef SMDN_PIPELINE_HPP_
#define SMDN_PIPELINE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "smdn/config.hpp"

namespace smdn {

inline const std::vector<std::string> kSubcommands = {
    "synth-data", "train-sv", "cluster",  "pretrain-gate", "pretrain-specialists",
    "train-baseline", "finetune", "evaluate", "report", "selftest"};

struct PipelineOptions {
  bool force = false;             // evaluate: accept artifacts from different configs
  std::ostream* console = nullptr;  // progress lines; null for silence
  std::string selftest_filter;
};

/// Runs one stage. Returns the process exit status; stage errors propagate as
/// exceptions (a missing prerequisite raises ConfigError naming the stage to
/// run first).
int run_stage(const std::string& subcommand, const RunConfig& config, const PipelineOptions& options = {});

/// Every training stage in order followed by evaluate.
void run_all(const RunConfig& config, const PipelineOptions& options = {});

// Artifact paths inside a run directory.
std::string embed_checkpoint_path(const RunConfig& c);
std::string cluster_model_path(const RunConfig& c);
std::string gate_checkpoint_path(const RunConfig& c);
std::string specialist_checkpoint_path(const RunConfig& c, int hidden, int k);
std::string baseline_checkpoint_path(const RunConfig& c, int hidden);
/// `component` is "gate" or "spec<k>".
std::string finetuned_checkpoint_path(const RunConfig& c, int hidden, const std::string& component);
std::string ensemble_manifest_path(const RunConfig& c, const std::string& mode, int hidden);
std::string reports_dir(const RunConfig& c);
std::string meta_path(const std::string& artifact);

}  // namespace smdn

#endif  // SMDN_PIPELINE_HPP_

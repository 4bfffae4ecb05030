// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Run configuration. The file format is INI-style sections named after the
// modules ([run], [data], [dsp], [embedding], [clustering], [enhancer],
// [ensemble], [eval]); command-line flags override individual keys.

#ifndef SMDN_CONFIG_HPP_
#define SMDN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "smdn/stft.hpp"
#include "smdn/synth.hpp"
#include "smdn/train.hpp"

namespace smdn {

struct StageBudget {
  int steps = 0;
  int batch = 16;
  double learning_rate = 1e-3;
  int eval_every = 50;
  int patience = 10;

  TrainOptions options(std::uint64_t seed) const;
};

struct RunConfig {
  // [run]
  std::string name = "desk";
  std::uint64_t seed = 1;
  std::string out;  // run directory; empty means runs/<name>

  // [data]
  std::string utterance_manifest;  // empty: synthesize
  std::string noise_manifest;
  SynthOptions synth;
  double holdout_fraction = 0.2;

  // [dsp]
  StftConfig stft;

  // [embedding]
  StageBudget embedding{1000, 16, 1e-3, 50, 10};
  int sv_validation_pairs = 200;

  // [clustering]
  int k = 2;
  int renderings = 4;
  int restarts = 10;

  // [enhancer]
  std::vector<int> hidden = {32};
  StageBudget enhancer{1500, 16, 1e-3, 100, 10};
  int denoise_validation = 40;

  // [ensemble]
  StageBudget gate{300, 16, 1e-2, 25, 10};
  StageBudget finetune{400, 16, 1e-4, 50, 10};
  double lambda = 10.0;
  int gate_validation = 100;

  // [eval]
  int eval_uniform = 40;
  int eval_per_snr = 10;

  std::string run_dir() const;
  /// Canonical key=value text; every key appears once in fixed order.
  std::string canonical() const;
  /// Content hash of canonical().
  std::string hash() const;
};

/// Parses INI text. Unknown sections or keys raise ConfigError.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path);

/// Applies "section.key=value".
void apply_override(RunConfig& config, const std::string& assignment);

/// Range checks; throws ConfigError.
void validate_config(const RunConfig& config);

}  // namespace smdn

#endif  // SMDN_CONFIG_HPP_

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// smdn <subcommand> [--config PATH] [--seed N] [--out DIR] [--k N]
//      [--hidden N] [--force] [--set section.key=value ...]
// Worker threads come from SMDN_THREADS.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "smdn/errors.hpp"
#include "smdn/pipeline.hpp"
#include "smdn/property_suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Speaker-specialist ensemble speech enhancement pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  int k = 0;
  std::vector<int> hidden;
  bool force = false;
  bool quiet = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "run directory (default runs/<name>)");
  app.add_option("--k", k, "number of clusters")->check(CLI::PositiveNumber);
  app.add_option("--hidden", hidden, "specialist and baseline hidden sizes")->check(CLI::PositiveNumber);
  app.add_flag("--force", force, "evaluate artifacts produced by different configs");
  app.add_flag("--quiet", quiet, "no progress output");
  app.add_option("--set", overrides, "override a config key, section.key=value");

  app.fallthrough();
  std::string filter;
  std::string json_path;
  const std::map<std::string, std::string> about = {
      {"synth-data", "render the synthetic corpus into <out>/corpus"},
      {"train-sv", "train the speaker embedding on noisy pairs"},
      {"cluster", "k-means over training-speaker embeddings"},
      {"pretrain-gate", "train the gate on cluster labels"},
      {"pretrain-specialists", "train one denoiser per cluster and hidden size"},
      {"train-baseline", "train the generalist denoiser per hidden size"},
      {"finetune", "jointly fine-tune gate and specialists"},
      {"evaluate", "score baseline and ensembles on the test set"},
      {"report", "render reports/report.txt from the evaluation"},
      {"selftest", "run the property and oracle suite"}};
  for (const auto& name : smdn::kSubcommands) {
    auto* sub = app.add_subcommand(name, about.at(name));
    if (name == "selftest") {
      sub->add_option("--filter", filter, "run only cases whose name contains this");
      sub->add_option("--json", json_path, "write results as JSON");
    }
  }
  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    if (subcommand == "selftest") {
      const smdn::SuiteResult r = smdn::run_suite(filter, &std::cout);
      if (!json_path.empty()) {
        std::ofstream(json_path) << smdn::suite_json(r);
      }
      return r.failures() == 0 ? 0 : 1;
    }
    smdn::RunConfig config = config_path.empty() ? smdn::RunConfig{} : smdn::load_config(config_path);
    for (const auto& o : overrides) smdn::apply_override(config, o);
    if (*seed_opt) config.seed = seed;
    if (!out.empty()) config.out = out;
    if (k > 0) config.k = k;
    if (!hidden.empty()) config.hidden = hidden;

    smdn::PipelineOptions options;
    options.force = force;
    options.console = quiet ? nullptr : &std::cerr;
    return smdn::run_stage(subcommand, config, options);
  } catch (const std::exception& e) {
    std::cerr << "smdn " << subcommand << ": " << e.what() << "\n";
    return 2;
  }
}

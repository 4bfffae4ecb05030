// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "smdn/evaluate.hpp"
#include "smdn/pipeline.hpp"

using namespace smdn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("smdn_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig tiny(const fs::path& dir) {
  RunConfig c = load_config(SMDN_SOURCE_DIR "/configs/smoke.ini");
  c.out = dir.string();
  return c;
}

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing, overrides and hashing") {
  const RunConfig d;
  CHECK(d.hidden == std::vector<int>{32});
  CHECK(d.k == 2);
  CHECK(d.finetune.learning_rate == 1e-4);
  CHECK(d.run_dir() == "runs/desk");

  const RunConfig c = parse_config(R"(
# comment
[run]
name = "trial"
seed = 9
[enhancer]
hidden = [16, 32]
learning_rate = 0.002
[ensemble]
lambda = 5
)");
  CHECK(c.name == "trial");
  CHECK(c.seed == 9);
  CHECK(c.hidden == std::vector<int>{16, 32});
  CHECK(c.enhancer.learning_rate == 0.002);
  CHECK(c.lambda == 5.0);
  CHECK(c.run_dir() == "runs/trial");

  RunConfig o = c;
  apply_override(o, "clustering.k=5");
  CHECK(o.k == 5);
  CHECK(o.hash() != c.hash());
  RunConfig moved = c;
  moved.out = "/elsewhere";
  CHECK(moved.hash() == c.hash());

  CHECK_THROWS_AS(parse_config("[run]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nosuch]\nk = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[clustering]\nk = two\n"), ConfigError);
  CHECK_THROWS_AS(apply_override(o, "clustering.k"), ConfigError);
  RunConfig bad;
  bad.k = 1;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = RunConfig{};
  bad.utterance_manifest = "u.jsonl";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("stages name their missing prerequisite") {
  const fs::path dir = scratch("prereq");
  RunConfig c = tiny(dir);
  try {
    run_stage("cluster", c);
    FAIL("cluster ran without a corpus or embed checkpoint");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("requires embed checkpoint") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(run_stage("train-sv", c), doctest::Contains("synth-data"), ConfigError);
  CHECK_THROWS_AS(run_stage("no-such-stage", c), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("full pipeline is reproducible byte for byte") {
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  run_all(tiny(a));
  run_all(tiny(b));

  const auto first = artifacts(a);
  const auto second = artifacts(b);
  REQUIRE(first.size() == second.size());
  for (const auto& [name, bytes] : first) {
    INFO(name);
    REQUIRE(second.count(name) == 1);
    CHECK(second.at(name) == bytes);
  }
  CHECK(first.count("checkpoints/embed.ckpt") == 1);
  CHECK(first.count("clusters/k2.json") == 1);
  CHECK(first.count("clusters/ensemble_finetuned_k2_h4.json") == 1);
  CHECK(first.count("logs/evaluate.log") == 1);

  const auto summary = parse_summary_csv(first.at("reports/summary.csv"));
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].model == "baseline_h4");
  CHECK(summary[1].model == "naive_k2_h4");
  CHECK(summary[2].model == "finetuned_k2_h4");
  CHECK(summary[1].effective_params < summary[1].total_params);
  CHECK(parse_records_csv(first.at("reports/records.csv")).size() == 3 * (2 + 4));

  SUBCASE("rerunning one stage rewrites identical bytes") {
    run_stage("pretrain-specialists", tiny(a));
    CHECK(artifacts(a) == first);
  }
  SUBCASE("report renders the summary") {
    run_stage("report", tiny(a));
    CHECK(slurp(a / "reports/report.txt").find("finetuned_k2_h4") != std::string::npos);
  }
  SUBCASE("evaluate refuses artifacts from different configs unless forced") {
    RunConfig changed = tiny(a);
    changed.finetune.steps = 1;
    run_stage("finetune", changed);
    CHECK_THROWS_WITH_AS(run_stage("evaluate", changed), doctest::Contains("different configs"), ConfigError);
    PipelineOptions force;
    force.force = true;
    CHECK(run_stage("evaluate", changed, force) == 0);
  }
  SUBCASE("a manifest that disagrees with its checkpoints is rejected") {
    const fs::path manifest = a / "clusters/ensemble_naive_k2_h4.json";
    std::string text = slurp(manifest);
    text.replace(text.find("\"K\": 2"), 6, "\"K\": 3");
    std::ofstream(manifest, std::ios::binary) << text;
    CHECK_THROWS_WITH_AS(run_stage("evaluate", tiny(a)), doctest::Contains("mismatch"), FormatError);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_EVALUATE_HPP_
#define SMDN_EVALUATE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smdn/stages.hpp"

namespace smdn {

/// Evaluation SNRs used for the stratified part of the test set.
inline const std::vector<double> kFixedSnrs = {-5.0, 0.0, 5.0, 10.0};

struct TestSet {
  std::vector<Prepared> mixtures;
  std::vector<std::string> strata;  // "uniform" or "snr<value>"
};

/// Frozen, seeded test mixtures: `uniform` draws over [-5, 10] dB followed by
/// `per_snr` draws at each fixed SNR. Every model is scored on this list.
TestSet make_test_set(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                      int uniform, int per_snr, std::uint64_t seed, const StftConfig& cfg);

struct EvalRecord {
  std::string model;
  std::string utterance;
  std::string speaker;
  std::string stratum;
  double snr_db = 0.0;
  double input_sisdr = 0.0;
  double output_sisdr = 0.0;
  double sisdri = 0.0;
  int k_star = -1;            // ensembles only
  double gate_entropy = -1.0;  // nats, ensembles only
};

struct ModelSummary {
  std::string model;
  int k = 0;  // 0 for a single denoiser
  int hidden = 0;
  std::int64_t total_params = 0;
  std::int64_t effective_params = 0;
  double mean_sisdri = 0.0;
  double gate_accuracy = -1.0;  // -1 when undefined
  std::size_t records = 0;
};

struct EvalReport {
  std::vector<EvalRecord> records;
  std::vector<ModelSummary> summaries;

  void append(const EvalReport& other);
};

/// Scores one denoiser.
EvalReport evaluate_denoiser(const std::string& name, const DenoiseNet<Real>& net, const TestSet& set);

/// Scores an ensemble under hard routing. `reference_labels` maps test
/// speakers to a diagnostic cluster label; gate accuracy is the fraction of
/// records routed to it (left undefined when the map is empty).
EvalReport evaluate_ensemble(const std::string& name, const EnsembleNet<Real>& model, const TestSet& set,
                             const std::map<std::string, int>& reference_labels, double lambda = kFinetuneLambda);

/// Scores the passthrough mask (all ones).
EvalReport evaluate_identity(const TestSet& set);

/// Nearest-centroid label of each speaker's mean embedding.
std::map<std::string, int> nearest_centroid_labels(const std::map<std::string, std::vector<Eigen::VectorXd>>& embeddings,
                                                   const ClusterModel& clusters);

/// Recomputes per-model means (and gate accuracy when the map is given) from
/// the records.
std::vector<ModelSummary> summarize(const std::vector<EvalRecord>& records, const std::vector<ModelSummary>& shapes,
                                    const std::map<std::string, int>& reference_labels = {});

/// Writes records.csv, summary.csv and summary.json under `dir`.
void emit_report(const EvalReport& report, const std::string& dir);

std::string records_csv(const std::vector<EvalRecord>& records);
std::string summary_csv(const std::vector<ModelSummary>& summaries);
std::string summary_json(const std::vector<ModelSummary>& summaries);
std::vector<EvalRecord> parse_records_csv(const std::string& text);
std::vector<ModelSummary> parse_summary_csv(const std::string& text);

}  // namespace smdn

#endif  // SMDN_EVALUATE_HPP_

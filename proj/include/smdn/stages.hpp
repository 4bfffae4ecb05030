// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Training stages: speaker verification, speaker embedding for clustering,
// gate pretraining, denoiser pretraining and soft-gated fine-tuning.

#ifndef SMDN_STAGES_HPP_
#define SMDN_STAGES_HPP_

#include <map>
#include <string>
#include <vector>

#include "smdn/clustering.hpp"
#include "smdn/corpus.hpp"
#include "smdn/ensemble.hpp"
#include "smdn/mixing.hpp"
#include "smdn/train.hpp"

namespace smdn {

/// Network-ready view of one mixture at production precision.
struct Prepared {
  Spectrogram<Real> noisy;
  Matrix<Real> mag;
  Vector<Real> clean;  // cut to the analyzed length
  Vector<Real> mixture;
  std::string speaker;
  std::string utterance;
  double snr_db = 0.0;
};

Prepared prepare(const MixtureSample& m, const StftConfig& cfg);

/// Frozen list of mixtures drawn from `pool` with `noises`; entry i comes
/// from stream (seed, i) only.
std::vector<Prepared> fixed_mixtures(const std::vector<const Utterance*>& pool,
                                     const std::vector<const NoiseClip*>& noises, int count, std::uint64_t seed,
                                     const StftConfig& cfg);

struct PreparedPair {
  Matrix<Real> a;
  Matrix<Real> b;
  int same = 0;
};

std::vector<PreparedPair> fixed_pairs(const std::vector<const Utterance*>& pool,
                                      const std::vector<const NoiseClip*>& noises, int count, std::uint64_t seed,
                                      const StftConfig& cfg);

/// Fraction of pairs where sv_similarity >= 0.5 agrees with the label.
double pair_accuracy(const EmbedNet<Real>& net, const std::vector<PreparedPair>& pairs);

struct SvSetup {
  std::vector<const Utterance*> pool;
  std::vector<const NoiseClip*> noises;
  std::vector<PreparedPair> validation;
};

/// Siamese BCE training of f from random initialization.
EmbedNet<Real> train_sv(const SvSetup& setup, const TrainOptions& o, const StftConfig& cfg,
                        TrainResult* result = nullptr, const LogSink& log = {});

/// Embeddings of `renderings` noisy renderings of every utterance, grouped by
/// speaker, at double precision.
std::map<std::string, std::vector<Eigen::VectorXd>> embed_speakers(const EmbedNet<Real>& net,
                                                                   const std::vector<const Utterance*>& utterances,
                                                                   const std::vector<const NoiseClip*>& noises,
                                                                   int renderings, std::uint64_t seed,
                                                                   const StftConfig& cfg);

struct LabeledSetup {
  std::vector<const Utterance*> pool;
  std::vector<const NoiseClip*> noises;
  std::vector<Prepared> validation;
  std::vector<int> validation_labels;
};

/// Fraction of inputs whose gate argmax equals the label.
double gate_accuracy(const GateNet<Real>& gate_net, const std::vector<Prepared>& inputs,
                     const std::vector<int>& labels);

/// Trains the classifier on cluster labels with f frozen and lambda = 1.
GateNet<Real> pretrain_gate(const EmbedNet<Real>& f, const ClusterModel& clusters, const LabeledSetup& setup,
                            const TrainOptions& o, const StftConfig& cfg, TrainResult* result = nullptr,
                            const LogSink& log = {});

/// Mean SI-SDR improvement of a mask function over a fixed set.
template <typename MaskFn>
double mean_sisdri(const std::vector<Prepared>& set, MaskFn&& mask_fn) {
  if (set.empty()) throw ConfigError("mean_sisdri: empty set");
  double total = 0.0;
  for (const auto& p : set) {
    const Vector<Real> est = masked_reconstruction(p.noisy, Matrix<Real>(mask_fn(p)));
    total += si_sdr(est, p.clean) - si_sdr(p.mixture, p.clean);
  }
  return total / static_cast<double>(set.size());
}

struct DenoiseSetup {
  std::vector<const Utterance*> pool;
  std::vector<const NoiseClip*> noises;
  std::vector<Prepared> validation;
};

/// Negative SI-SDR training of one denoiser (specialist or generalist).
DenoiseNet<Real> train_denoiser(DenoiseNet<Real> init, const DenoiseSetup& setup, const TrainOptions& o,
                                const StftConfig& cfg, TrainResult* result = nullptr, const LogSink& log = {});

/// End-to-end soft-gated fine-tuning at lambda; validation uses hard routing.
EnsembleNet<Real> finetune(EnsembleNet<Real> model, const DenoiseSetup& setup, const TrainOptions& o,
                           const StftConfig& cfg, double lambda = kFinetuneLambda, TrainResult* result = nullptr,
                           const LogSink& log = {});

}  // namespace smdn

#endif  // SMDN_STAGES_HPP_

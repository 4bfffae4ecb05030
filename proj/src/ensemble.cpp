// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/stages.hpp"

namespace smdn {

namespace {

constexpr std::uint64_t kGateInit = 0x67617465ULL;
constexpr std::uint64_t kGateSamples = 0x67617431ULL;
constexpr std::uint64_t kFinetuneSamples = 0x66743031ULL;

std::uint64_t sample_index(int step, int batch, int index) {
  return static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(batch) + static_cast<std::uint64_t>(index);
}

}  // namespace

double gate_accuracy(const GateNet<Real>& gate_net, const std::vector<Prepared>& inputs,
                     const std::vector<int>& labels) {
  if (inputs.empty() || inputs.size() != labels.size()) throw ConfigError("gate_accuracy: bad validation set");
  int correct = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    correct += argmax_lowest(gate(inputs[i].mag, gate_net, Real(1))) == labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

GateNet<Real> pretrain_gate(const EmbedNet<Real>& f, const ClusterModel& clusters, const LabeledSetup& setup,
                            const TrainOptions& o, const StftConfig& cfg, TrainResult* result,
                            const LogSink& log) {
  if (clusters.k < 2) throw ConfigError("pretrain_gate: need at least two clusters");
  Rng init = Rng::derive(o.seed, kGateInit);
  GateNet<Real> net = GateNet<Real>::uniform(f, clusters.k, init);
  auto sample = [&](const Dense<Real>& classifier, int step, int index, Dense<Real>* grad) {
    Rng rng = Rng::derive(o.seed, kGateSamples, sample_index(step, o.batch, index));
    const MixtureSample m = draw_mixture(setup.pool, setup.noises, rng);
    const int label = clusters.label_of(m.speaker_id);
    GateNet<Real> probe{f, classifier};
    return gate_classification_loss(probe, prepare(m, cfg).mag, label, Real(kPretrainLambda), grad);
  };
  auto validate = [&](const Dense<Real>& classifier) {
    return gate_accuracy(GateNet<Real>{f, classifier}, setup.validation, setup.validation_labels);
  };
  TrainResult r = train_loop(net.classifier, sample, validate, o, log);
  if (result) *result = r;
  return net;
}

EnsembleNet<Real> finetune(EnsembleNet<Real> model, const DenoiseSetup& setup, const TrainOptions& o,
                           const StftConfig& cfg, double lambda, TrainResult* result, const LogSink& log) {
  model.validate();
  if (setup.pool.empty()) throw ConfigError("finetune: empty training pool");
  auto sample = [&](const EnsembleNet<Real>& m, int step, int index, EnsembleNet<Real>* grad) {
    Rng rng = Rng::derive(o.seed, kFinetuneSamples, sample_index(step, o.batch, index));
    const Prepared p = prepare(draw_mixture(setup.pool, setup.noises, rng), cfg);
    return ensemble_loss(m, p.noisy, p.clean, static_cast<Real>(lambda), grad);
  };
  auto validate = [&](const EnsembleNet<Real>& m) {
    return mean_sisdri(setup.validation,
                       [&](const Prepared& p) { return forward_hard(p.mag, m, static_cast<Real>(lambda)).mask; });
  };
  TrainResult r = train_loop(model, sample, validate, o, log);
  if (result) *result = r;
  return model;
}

}  // namespace smdn

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Sparsely active ensemble of specialist denoisers behind a speaker gate.
//
// The gate embeds the noisy input with f, classifies the embedding with a
// dense+softmax layer g, and hardens the softmax with a logit scale lambda.
// Training combines every specialist mask weighted by the gate
// probabilities; inference runs only the argmax specialist.

#ifndef SMDN_ENSEMBLE_HPP_
#define SMDN_ENSEMBLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "smdn/dense.hpp"
#include "smdn/embedding.hpp"
#include "smdn/enhancer.hpp"

namespace smdn {

/// Logit scale used for gate pretraining.
inline constexpr double kPretrainLambda = 1.0;
/// Logit scale used for fine-tuning and inference.
inline constexpr double kFinetuneLambda = 10.0;

template <typename S>
struct GateNet {
  using Scalar = S;

  EmbedNet<S> embed;
  Dense<S> classifier;  // K x dim

  static GateNet uniform(const EmbedNet<S>& f, Index clusters, Rng& rng) {
    return {f, Dense<S>::uniform(f.dim(), clusters, rng)};
  }

  Index clusters() const { return classifier.output_size(); }

  template <typename F>
  void visit(F&& f) {
    embed.visit([&](const std::string& n, auto& t) { f("embed." + n, t); });
    classifier.visit([&](const std::string& n, auto& t) { f("classifier." + n, t); });
  }
  template <typename F>
  void visit(F&& f) const {
    embed.visit([&](const std::string& n, const auto& t) { f("embed." + n, t); });
    classifier.visit([&](const std::string& n, const auto& t) { f("classifier." + n, t); });
  }
};

template <typename S>
struct GateTrace {
  EmbedTrace<S> embed;
  Vector<S> embedding;
  Vector<S> probs;
};

/// Cluster probabilities softmax(lambda * (W f(mag) + b)).
template <typename S>
Vector<S> gate(const Matrix<S>& mag, const GateNet<S>& net, S lambda, GateTrace<S>* trace = nullptr) {
  if (!(lambda > S(0))) throw DomainError("gate: lambda must be positive");
  GateTrace<S> local;
  GateTrace<S>& tr = trace ? *trace : local;
  tr.embedding = embed(mag, net.embed, trace ? &tr.embed : nullptr);
  const Vector<S> logits = dense_forward(tr.embedding, net.classifier, Activation::kIdentity);
  tr.probs = softmax(Vector<S>(lambda * logits));
  return tr.probs;
}

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Index argmax_lowest(const Eigen::MatrixBase<Derived>& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

template <typename S>
struct EnsembleNet {
  using Scalar = S;

  GateNet<S> gate;
  std::vector<DenoiseNet<S>> specialists;

  Index clusters() const { return static_cast<Index>(specialists.size()); }

  void validate() const {
    if (specialists.size() < 2) throw ConfigError("ensemble: needs at least two specialists");
    if (gate.clusters() != clusters()) throw ConfigError("ensemble: gate width does not match specialist count");
    for (const auto& s : specialists) {
      if (s.bins() != specialists.front().bins() || s.bins() != gate.embed.bins()) {
        throw ConfigError("ensemble: specialists disagree on input dimensionality");
      }
    }
  }

  template <typename F>
  void visit(F&& f) {
    gate.visit([&](const std::string& n, auto& t) { f("gate." + n, t); });
    for (std::size_t k = 0; k < specialists.size(); ++k) {
      const std::string prefix = "spec" + std::to_string(k) + ".";
      specialists[k].visit([&](const std::string& n, auto& t) { f(prefix + n, t); });
    }
  }
  template <typename F>
  void visit(F&& f) const {
    gate.visit([&](const std::string& n, const auto& t) { f("gate." + n, t); });
    for (std::size_t k = 0; k < specialists.size(); ++k) {
      const std::string prefix = "spec" + std::to_string(k) + ".";
      specialists[k].visit([&](const std::string& n, const auto& t) { f(prefix + n, t); });
    }
  }
};

template <typename S>
struct SoftOutput {
  Matrix<S> mask;
  Vector<S> probs;
};

template <typename S>
struct HardOutput {
  Matrix<S> mask;
  Index selected = 0;
  Vector<S> probs;
};

/// Every specialist runs; the mask is the probability-weighted sum.
template <typename S>
SoftOutput<S> forward_soft(const Matrix<S>& mag, const EnsembleNet<S>& model, S lambda = S(kFinetuneLambda)) {
  SoftOutput<S> out;
  out.probs = gate(mag, model.gate, lambda);
  out.mask = Matrix<S>::Zero(mag.rows(), mag.cols());
  for (Index k = 0; k < model.clusters(); ++k) {
    out.mask += out.probs[k] * denoise(mag, model.specialists[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Only the argmax specialist runs.
template <typename S>
HardOutput<S> forward_hard(const Matrix<S>& mag, const EnsembleNet<S>& model, S lambda = S(kFinetuneLambda)) {
  HardOutput<S> out;
  out.probs = gate(mag, model.gate, lambda);
  out.selected = argmax_lowest(out.probs);
  out.mask = denoise(mag, model.specialists[static_cast<std::size_t>(out.selected)]);
  return out;
}

template <typename S>
SoftOutput<S> forward_soft(const Waveform& x, const EnsembleNet<S>& model, const StftConfig& cfg,
                           S lambda = S(kFinetuneLambda)) {
  return forward_soft(stft(x.cast<S>(), cfg).magnitude(), model, lambda);
}

template <typename S>
HardOutput<S> forward_hard(const Waveform& x, const EnsembleNet<S>& model, const StftConfig& cfg,
                           S lambda = S(kFinetuneLambda)) {
  return forward_hard(stft(x.cast<S>(), cfg).magnitude(), model, lambda);
}

/// Negative SI-SDR of the soft-gated reconstruction. Gradients reach the
/// embedding, the classifier and every specialist.
template <typename S>
double ensemble_loss(const EnsembleNet<S>& model, const Spectrogram<S>& noisy, const Vector<S>& clean, S lambda,
                     EnsembleNet<S>* grad = nullptr) {
  const Matrix<S> mag = noisy.magnitude();
  if (!grad) return mask_loss(noisy, forward_soft(mag, model, lambda).mask, clean);

  const Index K = model.clusters();
  GateTrace<S> gate_trace;
  const Vector<S> p = gate(mag, model.gate, lambda, &gate_trace);
  std::vector<DenoiseTrace<S>> traces(static_cast<std::size_t>(K));
  Matrix<S> mask = Matrix<S>::Zero(mag.rows(), mag.cols());
  for (Index k = 0; k < K; ++k) {
    mask += p[k] * denoise(mag, model.specialists[static_cast<std::size_t>(k)], &traces[static_cast<std::size_t>(k)]);
  }
  Matrix<S> d_mask;
  const double loss = mask_loss(noisy, mask, clean, &d_mask);

  Vector<S> d_p(K);
  for (Index k = 0; k < K; ++k) {
    const auto& tr = traces[static_cast<std::size_t>(k)];
    d_p[k] = static_cast<S>(d_mask.template cast<double>().cwiseProduct(tr.mask.template cast<double>()).sum());
    denoise_backward(model.specialists[static_cast<std::size_t>(k)], tr, Matrix<S>(p[k] * d_mask),
                     grad->specialists[static_cast<std::size_t>(k)]);
  }
  // softmax(lambda * l): dl = lambda * p * (dp - <p, dp>)
  const Vector<S> d_logits = lambda * p.cwiseProduct((d_p.array() - p.dot(d_p)).matrix());
  const Matrix<S> d_z = dense_backward(Matrix<S>(gate_trace.embedding), Matrix<S>(), Matrix<S>(d_logits),
                                       model.gate.classifier, Activation::kIdentity, grad->gate.classifier);
  embed_backward(model.gate.embed, gate_trace.embed, Vector<S>(d_z.col(0)), grad->gate.embed);
  return loss;
}

/// Cross entropy of the gate against a cluster label (gate pretraining).
/// Only the classifier receives gradients; the embedding stays frozen.
template <typename S>
double gate_classification_loss(const GateNet<S>& net, const Matrix<S>& mag, Index label, S lambda,
                                Dense<S>* classifier_grad = nullptr, Vector<S>* probs = nullptr) {
  const Vector<S> z = embed(mag, net.embed);
  const Vector<S> logits = dense_forward(z, net.classifier, Activation::kIdentity);
  Vector<S> d_logits;
  const double loss = cross_entropy(logits, label, lambda, classifier_grad ? &d_logits : nullptr);
  if (probs) *probs = softmax(Vector<S>(lambda * logits));
  if (classifier_grad) {
    dense_backward(Matrix<S>(z), Matrix<S>(), Matrix<S>(d_logits), net.classifier, Activation::kIdentity,
                   *classifier_grad, false);
  }
  return loss;
}

struct ParamCounts {
  std::int64_t total = 0;
  std::int64_t effective = 0;
};

/// Closed-form parameter count of one double-bias GRU layer.
constexpr std::int64_t gru_param_count(std::int64_t input, std::int64_t hidden) {
  return 3 * (input * hidden + hidden * hidden + 2 * hidden);
}

/// Parameters of one denoiser with hidden size H over `bins` frequency bins.
constexpr std::int64_t denoiser_param_count(std::int64_t hidden, std::int64_t bins = 513) {
  return gru_param_count(bins, hidden) + gru_param_count(hidden, hidden) + hidden * bins + bins;
}

constexpr std::int64_t gate_param_count(std::int64_t clusters, std::int64_t embed_hidden = 32,
                                        std::int64_t bins = 513) {
  return gru_param_count(bins, embed_hidden) + gru_param_count(embed_hidden, embed_hidden) +
         embed_hidden * clusters + clusters;
}

/// Total (gate + K specialists) and run-time effective (gate + one
/// specialist) parameter counts of a sparse ensemble.
constexpr ParamCounts param_counts(std::int64_t clusters, std::int64_t hidden, std::int64_t embed_hidden = 32,
                                   std::int64_t bins = 513) {
  const std::int64_t g = gate_param_count(clusters, embed_hidden, bins);
  const std::int64_t h = denoiser_param_count(hidden, bins);
  return {g + clusters * h, g + h};
}

}  // namespace smdn

#endif  // SMDN_ENSEMBLE_HPP_

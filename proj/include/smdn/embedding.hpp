// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Speaker embedding network f: two GRU layers whose final-frame hidden state
// is the utterance embedding, trained Siamese-style on same/different pairs.

#ifndef SMDN_EMBEDDING_HPP_
#define SMDN_EMBEDDING_HPP_

#include <string>

#include "smdn/gru.hpp"
#include "smdn/losses.hpp"
#include "smdn/stft.hpp"

namespace smdn {

inline constexpr Index kEmbeddingSize = 32;

template <typename S>
struct EmbedNet {
  using Scalar = S;

  GruLayer<S> gru1;
  GruLayer<S> gru2;

  static EmbedNet zeros(Index bins, Index dim = kEmbeddingSize) {
    return {GruLayer<S>::zeros(bins, dim), GruLayer<S>::zeros(dim, dim)};
  }

  static EmbedNet uniform(Index bins, Index dim, Rng& rng) {
    EmbedNet net;
    net.gru1 = GruLayer<S>::uniform(bins, dim, rng);
    net.gru2 = GruLayer<S>::uniform(dim, dim, rng);
    return net;
  }

  Index bins() const { return gru1.input_size(); }
  Index dim() const { return gru2.hidden_size(); }

  template <typename F>
  void visit(F&& f) {
    gru1.visit([&](const std::string& n, auto& t) { f("gru1." + n, t); });
    gru2.visit([&](const std::string& n, auto& t) { f("gru2." + n, t); });
  }
  template <typename F>
  void visit(F&& f) const {
    gru1.visit([&](const std::string& n, const auto& t) { f("gru1." + n, t); });
    gru2.visit([&](const std::string& n, const auto& t) { f("gru2." + n, t); });
  }
};

template <typename S>
struct EmbedTrace {
  Matrix<S> features;
  GruTrace<S> layer1;
  GruTrace<S> layer2;
  Matrix<S> hidden1;
};

template <typename S>
Vector<S> embed(const Matrix<S>& mag, const EmbedNet<S>& net, EmbedTrace<S>* trace = nullptr) {
  if (mag.cols() < 1) throw LengthError("embed: empty frame sequence");
  EmbedTrace<S> local;
  EmbedTrace<S>& tr = trace ? *trace : local;
  tr.features = compress_magnitude(mag);
  tr.hidden1 = gru_forward(net.gru1, tr.features, trace ? &tr.layer1 : nullptr);
  const Matrix<S> hidden2 = gru_forward(net.gru2, tr.hidden1, trace ? &tr.layer2 : nullptr);
  return hidden2.col(hidden2.cols() - 1);
}

/// Backpropagates dL/dz from the last-frame readout through both layers.
template <typename S>
void embed_backward(const EmbedNet<S>& net, const EmbedTrace<S>& trace, const Vector<S>& d_z, EmbedNet<S>& grad) {
  const Index T = trace.hidden1.cols();
  Matrix<S> d_h2 = Matrix<S>::Zero(net.dim(), T);
  d_h2.col(T - 1) = d_z;
  Matrix<S> d_h1;
  gru_backward(net.gru2, trace.hidden1, trace.layer2, d_h2, grad.gru2, &d_h1);
  gru_backward(net.gru1, trace.features, trace.layer1, d_h1, grad.gru1);
}

/// Inner product of two embeddings, accumulated at double precision.
template <typename S>
double embedding_logit(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) throw DimensionError("sv_similarity: embedding sizes differ");
  return a.template cast<double>().dot(b.template cast<double>());
}

/// Same-speaker probability sigmoid(z_i . z_j).
template <typename S>
double sv_similarity(const Vector<S>& a, const Vector<S>& b) {
  return sigmoid(embedding_logit(a, b));
}

/// BCE on one Siamese pair; both branches share `net` and both contribute to
/// `grad` when non-null.
template <typename S>
double siamese_pair_loss(const EmbedNet<S>& net, const Matrix<S>& mag_a, const Matrix<S>& mag_b, int same,
                         EmbedNet<S>* grad = nullptr, double* probability = nullptr) {
  EmbedTrace<S> ta;
  EmbedTrace<S> tb;
  const Vector<S> za = embed(mag_a, net, grad ? &ta : nullptr);
  const Vector<S> zb = embed(mag_b, net, grad ? &tb : nullptr);
  const double logit = embedding_logit(za, zb);
  const LossGrad lg = bce_with_logit(logit, same);
  if (probability) *probability = sigmoid(logit);
  if (grad) {
    const S g = static_cast<S>(lg.grad);
    embed_backward(net, ta, Vector<S>(g * zb), *grad);
    embed_backward(net, tb, Vector<S>(g * za), *grad);
  }
  return lg.loss;
}

}  // namespace smdn

#endif  // SMDN_EMBEDDING_HPP_

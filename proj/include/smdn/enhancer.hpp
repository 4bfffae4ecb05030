// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Mask-estimating denoiser: two GRU layers and a sigmoid output layer per
// frame. Used both for specialists and for the generalist baseline.

#ifndef SMDN_ENHANCER_HPP_
#define SMDN_ENHANCER_HPP_

#include <string>

#include "smdn/dense.hpp"
#include "smdn/gru.hpp"
#include "smdn/si_sdr.hpp"
#include "smdn/stft.hpp"

namespace smdn {

template <typename S>
struct DenoiseNet {
  using Scalar = S;

  GruLayer<S> gru1;
  GruLayer<S> gru2;
  Dense<S> out;

  static DenoiseNet zeros(Index bins, Index hidden) {
    return {GruLayer<S>::zeros(bins, hidden), GruLayer<S>::zeros(hidden, hidden), Dense<S>::zeros(hidden, bins)};
  }

  static DenoiseNet uniform(Index bins, Index hidden, Rng& rng) {
    DenoiseNet net;
    net.gru1 = GruLayer<S>::uniform(bins, hidden, rng);
    net.gru2 = GruLayer<S>::uniform(hidden, hidden, rng);
    net.out = Dense<S>::uniform(hidden, bins, rng);
    return net;
  }

  Index bins() const { return gru1.input_size(); }
  Index hidden_size() const { return gru1.hidden_size(); }

  template <typename F>
  void visit(F&& f) {
    gru1.visit([&](const std::string& n, auto& t) { f("gru1." + n, t); });
    gru2.visit([&](const std::string& n, auto& t) { f("gru2." + n, t); });
    out.visit([&](const std::string& n, auto& t) { f("out." + n, t); });
  }
  template <typename F>
  void visit(F&& f) const {
    gru1.visit([&](const std::string& n, const auto& t) { f("gru1." + n, t); });
    gru2.visit([&](const std::string& n, const auto& t) { f("gru2." + n, t); });
    out.visit([&](const std::string& n, const auto& t) { f("out." + n, t); });
  }
};

template <typename S>
struct DenoiseTrace {
  Matrix<S> features;
  GruTrace<S> layer1;
  GruTrace<S> layer2;
  Matrix<S> hidden1;
  Matrix<S> hidden2;
  Matrix<S> mask;
};

/// Causal frame-by-frame mask estimate for magnitude frames `mag` (bins x T).
template <typename S>
Matrix<S> denoise(const Matrix<S>& mag, const DenoiseNet<S>& net, DenoiseTrace<S>* trace = nullptr) {
  if (mag.cols() < 1) throw LengthError("denoise: empty frame sequence");
  DenoiseTrace<S> local;
  DenoiseTrace<S>& tr = trace ? *trace : local;
  tr.features = compress_magnitude(mag);
  tr.hidden1 = gru_forward(net.gru1, tr.features, trace ? &tr.layer1 : nullptr);
  tr.hidden2 = gru_forward(net.gru2, tr.hidden1, trace ? &tr.layer2 : nullptr);
  tr.mask = dense_forward(tr.hidden2, net.out, Activation::kSigmoid);
  return tr.mask;
}

template <typename S>
void denoise_backward(const DenoiseNet<S>& net, const DenoiseTrace<S>& trace, const Matrix<S>& d_mask,
                      DenoiseNet<S>& grad) {
  const Matrix<S> d_h2 = dense_backward(trace.hidden2, trace.mask, d_mask, net.out, Activation::kSigmoid, grad.out);
  Matrix<S> d_h1;
  gru_backward(net.gru2, trace.hidden1, trace.layer2, d_h2, grad.gru2, &d_h1);
  gru_backward(net.gru1, trace.features, trace.layer1, d_h1, grad.gru1);
}

/// Reconstruction of `noisy` under `mask` with the noisy phase.
template <typename S>
Vector<S> masked_reconstruction(const Spectrogram<S>& noisy, const Matrix<S>& mask) {
  return istft(apply_mask(noisy, mask));
}

/// Negative SI-SDR of the masked reconstruction against `clean`, which must
/// already be cut to the analyzed length. Writes dLoss/dmask when asked.
template <typename S>
double mask_loss(const Spectrogram<S>& noisy, const Matrix<S>& mask, const Vector<S>& clean,
                 Matrix<S>* d_mask = nullptr) {
  const Vector<S> estimate = masked_reconstruction(noisy, mask);
  if (!d_mask) return -si_sdr(estimate, clean);
  Vector<S> d_est;
  const double sdr = si_sdr(estimate, clean, &d_est);
  *d_mask = istft_mask_gradient(noisy, Vector<S>(-d_est));
  return -sdr;
}

/// Full specialist training objective for one mixture; accumulates parameter
/// gradients into `grad` when non-null.
template <typename S>
double enhancement_loss(const DenoiseNet<S>& net, const Spectrogram<S>& noisy, const Vector<S>& clean,
                        DenoiseNet<S>* grad = nullptr) {
  if (!grad) return mask_loss(noisy, denoise(noisy.magnitude(), net), clean);
  DenoiseTrace<S> trace;
  const Matrix<S> mask = denoise(noisy.magnitude(), net, &trace);
  Matrix<S> d_mask;
  const double loss = mask_loss(noisy, mask, clean, &d_mask);
  denoise_backward(net, trace, d_mask, *grad);
  return loss;
}

}  // namespace smdn

#endif  // SMDN_ENHANCER_HPP_

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_LOSSES_HPP_
#define SMDN_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <string>

#include "smdn/activations.hpp"
#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

inline constexpr double kProbabilityClamp = 1e-7;

/// Binary cross entropy of a probability against a {0,1} target.
inline double bce_loss(double y_hat, int y) {
  if (y != 0 && y != 1) throw DomainError("bce_loss: target must be 0 or 1, got " + std::to_string(y));
  const double p = std::clamp(y_hat, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
}

struct LossGrad {
  double loss = 0.0;
  double grad = 0.0;
};

/// BCE of sigmoid(logit). The gradient is the usual sigmoid-BCE form
/// sigmoid(logit) - y, which matches the clamped loss wherever the clamp is
/// inactive.
inline LossGrad bce_with_logit(double logit, int y) {
  const double p = sigmoid(logit);
  return {bce_loss(p, y), p - static_cast<double>(y)};
}

/// Cross entropy of softmax(scale * logits) against class `target`.
/// Returns the loss and writes dL/dlogits (already multiplied by scale).
template <typename S>
double cross_entropy(const Vector<S>& logits, Index target, S scale, Vector<S>* d_logits = nullptr) {
  if (target < 0 || target >= logits.size()) {
    throw DomainError("cross_entropy: label " + std::to_string(target) + " outside [0," +
                      std::to_string(logits.size()) + ")");
  }
  const Vector<S> scaled = scale * logits;
  const Vector<S> p = softmax(scaled);
  const double loss = -std::log(std::max(static_cast<double>(p[target]), 1e-300));
  if (d_logits) {
    *d_logits = p;
    (*d_logits)[target] -= S(1);
    *d_logits *= scale;
  }
  return loss;
}

}  // namespace smdn

#endif  // SMDN_LOSSES_HPP_

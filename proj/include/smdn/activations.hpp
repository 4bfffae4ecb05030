// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_ACTIVATIONS_HPP_
#define SMDN_ACTIVATIONS_HPP_

#include <cmath>
#include <concepts>

#include "smdn/tensor.hpp"

namespace smdn {

template <std::floating_point Scalar>
inline Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) { return sigmoid(v); });
}

/// Column-wise softmax. Normalizer accumulated at double precision.
template <typename Derived>
Matrix<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using S = typename Derived::Scalar;
  Matrix<S> out(logits.rows(), logits.cols());
  for (Index c = 0; c < logits.cols(); ++c) {
    const double peak = static_cast<double>(logits.col(c).maxCoeff());
    double total = 0.0;
    for (Index r = 0; r < logits.rows(); ++r) total += std::exp(static_cast<double>(logits(r, c)) - peak);
    for (Index r = 0; r < logits.rows(); ++r) {
      out(r, c) = static_cast<S>(std::exp(static_cast<double>(logits(r, c)) - peak) / total);
    }
  }
  return out;
}

}  // namespace smdn

#endif  // SMDN_ACTIVATIONS_HPP_

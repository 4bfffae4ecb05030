// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_DENSE_HPP_
#define SMDN_DENSE_HPP_

#include <cmath>
#include <string>

#include "smdn/activations.hpp"
#include "smdn/random.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

enum class Activation { kIdentity, kSigmoid, kSoftmax };

/// Affine layer y = act(W x + b), applied to every column of x.
template <typename S>
struct Dense {
  using Scalar = S;

  Matrix<S> weight;  // out x in
  Vector<S> bias;    // out

  static Dense zeros(Index in, Index out) {
    Dense d;
    d.weight = Matrix<S>::Zero(out, in);
    d.bias = Vector<S>::Zero(out);
    return d;
  }

  /// Uniform in [-1/sqrt(in), 1/sqrt(in)].
  static Dense uniform(Index in, Index out, Rng& rng) {
    Dense d = zeros(in, out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (Index i = 0; i < d.weight.size(); ++i) d.weight.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
    for (Index i = 0; i < d.bias.size(); ++i) d.bias[i] = static_cast<S>(rng.uniform(-bound, bound));
    return d;
  }

  Index input_size() const { return weight.cols(); }
  Index output_size() const { return weight.rows(); }

  template <typename F>
  void visit(F&& f) {
    f("W", weight);
    f("b", bias);
  }
  template <typename F>
  void visit(F&& f) const {
    f("W", weight);
    f("b", bias);
  }
};

template <typename Derived>
Matrix<typename Derived::Scalar> dense_forward(const Eigen::MatrixBase<Derived>& x,
                                               const Dense<typename Derived::Scalar>& layer,
                                               Activation act) {
  using S = typename Derived::Scalar;
  if (x.rows() != layer.input_size() || layer.bias.size() != layer.output_size()) {
    throw DimensionError("dense_forward: input has " + std::to_string(x.rows()) + " rows, layer expects " +
                         std::to_string(layer.input_size()));
  }
  Matrix<S> pre = layer.weight * x;
  pre.colwise() += layer.bias;
  switch (act) {
    case Activation::kSigmoid:
      return sigmoid(pre);
    case Activation::kSoftmax:
      return softmax(pre);
    case Activation::kIdentity:
      break;
  }
  return pre;
}

/// Accumulates parameter gradients into `grad` and returns dL/dx when
/// `want_input_grad` is set (empty matrix otherwise).
template <typename S>
Matrix<S> dense_backward(const Matrix<S>& x, const Matrix<S>& y, const Matrix<S>& dy, const Dense<S>& layer,
                         Activation act, Dense<S>& grad, bool want_input_grad = true) {
  if (dy.rows() != layer.output_size() || dy.cols() != x.cols()) throw DimensionError("dense_backward: dy shape");
  Matrix<S> dpre;
  switch (act) {
    case Activation::kIdentity:
      dpre = dy;
      break;
    case Activation::kSigmoid:
      dpre = dy.cwiseProduct(y.cwiseProduct((S(1) - y.array()).matrix()));
      break;
    case Activation::kSoftmax: {
      dpre.resize(dy.rows(), dy.cols());
      for (Index c = 0; c < dy.cols(); ++c) {
        const S inner = y.col(c).dot(dy.col(c));
        dpre.col(c) = y.col(c).cwiseProduct((dy.col(c).array() - inner).matrix());
      }
      break;
    }
  }
  grad.weight.noalias() += dpre * x.transpose();
  grad.bias += dpre.rowwise().sum();
  if (!want_input_grad) return {};
  return layer.weight.transpose() * dpre;
}

}  // namespace smdn

#endif  // SMDN_DENSE_HPP_

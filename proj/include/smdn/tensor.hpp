// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Dense tensor aliases and parameter-visitor helpers shared by every network.
//
// A network type `Net<Scalar>` exposes `using Scalar = ...` and a pair of
// `visit(f)` members calling `f(name, tensor)` for each parameter, in a fixed
// order. Everything below (flattening, zeroing, casting, counting) is written
// against that contract only.

#ifndef SMDN_TENSOR_HPP_
#define SMDN_TENSOR_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smdn/errors.hpp"

namespace smdn {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Production precision. Gradient checks instantiate the same templates at double.
using Real = float;

/// Time-domain mono signal. Kept at double so mixtures add exactly.
using Waveform = Eigen::VectorXd;

/// Flat, non-owning view of one named parameter tensor.
template <typename Scalar>
struct TensorView {
  std::string name;
  std::span<Scalar> values;
  Index rows = 0;
  Index cols = 0;
  int rank = 2;
};

template <typename Derived>
constexpr int tensor_rank() {
  return Derived::ColsAtCompileTime == 1 ? 1 : 2;
}

template <typename Net>
std::vector<TensorView<typename Net::Scalar>> tensor_views(Net& net) {
  using S = typename Net::Scalar;
  std::vector<TensorView<S>> out;
  net.visit([&out](const std::string& name, auto& t) {
    using T = std::remove_cvref_t<decltype(t)>;
    out.push_back({name, std::span<S>(t.data(), static_cast<std::size_t>(t.size())), t.rows(),
                   t.cols(), tensor_rank<T>()});
  });
  return out;
}

template <typename Net>
std::vector<TensorView<const typename Net::Scalar>> tensor_views(const Net& net) {
  using S = typename Net::Scalar;
  std::vector<TensorView<const S>> out;
  net.visit([&out](const std::string& name, const auto& t) {
    using T = std::remove_cvref_t<decltype(t)>;
    out.push_back({name, std::span<const S>(t.data(), static_cast<std::size_t>(t.size())),
                   t.rows(), t.cols(), tensor_rank<T>()});
  });
  return out;
}

template <typename Net>
std::int64_t param_count(const Net& net) {
  std::int64_t n = 0;
  net.visit([&n](const std::string&, const auto& t) { n += t.size(); });
  return n;
}

template <typename Net>
void set_zero(Net& net) {
  net.visit([](const std::string&, auto& t) { t.setZero(); });
}

template <typename Net>
Net zeros_like(const Net& net) {
  Net out = net;
  set_zero(out);
  return out;
}

template <typename Net>
Vector<typename Net::Scalar> flatten(const Net& net) {
  Vector<typename Net::Scalar> flat(param_count(net));
  Index offset = 0;
  net.visit([&](const std::string&, const auto& t) {
    flat.segment(offset, t.size()) = t.reshaped();
    offset += t.size();
  });
  return flat;
}

template <typename Net>
void unflatten(Net& net, const Vector<typename Net::Scalar>& flat) {
  if (flat.size() != param_count(net)) throw DimensionError("unflatten: size mismatch");
  Index offset = 0;
  net.visit([&](const std::string&, auto& t) {
    t.reshaped() = flat.segment(offset, t.size());
    offset += t.size();
  });
}

/// dst += scale * src, parameter by parameter.
template <typename Net>
void axpy(Net& dst, const Net& src, typename Net::Scalar scale) {
  auto d = tensor_views(dst);
  auto s = tensor_views(src);
  if (d.size() != s.size()) throw DimensionError("axpy: parameter lists differ");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].values.size() != s[i].values.size()) throw DimensionError("axpy: " + d[i].name);
    for (std::size_t j = 0; j < d[i].values.size(); ++j) d[i].values[j] += scale * s[i].values[j];
  }
}

template <typename Net>
bool all_finite(const Net& net) {
  bool ok = true;
  net.visit([&ok](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

/// Copy parameters of `src` into `dst` (same layout, any scalar types).
template <typename Dst, typename Src>
void copy_params(Dst& dst, const Src& src) {
  auto s = tensor_views(src);
  std::size_t i = 0;
  dst.visit([&](const std::string& name, auto& t) {
    if (i >= s.size()) throw DimensionError("copy_params: too few source tensors");
    const auto& v = s[i++];
    if (v.name != name) throw DimensionError("copy_params: " + v.name + " vs " + name);
    t.resize(v.rows, v.cols);
    for (Index k = 0; k < t.size(); ++k) {
      t.data()[k] = static_cast<typename Dst::Scalar>(v.values[static_cast<std::size_t>(k)]);
    }
  });
  if (i != s.size()) throw DimensionError("copy_params: too many source tensors");
}

}  // namespace smdn

#endif  // SMDN_TENSOR_HPP_

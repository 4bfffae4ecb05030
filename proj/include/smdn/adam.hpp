// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_ADAM_HPP_
#define SMDN_ADAM_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter moments, one flat vector per network tensor.
template <typename S>
struct AdamState {
  std::vector<Vector<S>> first;
  std::vector<Vector<S>> second;
  std::int64_t step = 0;
};

/// Bias-corrected Adam. Moment buffers are created on the first update and
/// must keep matching the parameter layout afterwards.
template <typename S>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  const AdamState<S>& state() const { return state_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

  template <typename Net>
  void update(Net& params, const Net& grads) {
    auto p = tensor_views(params);
    auto g = tensor_views(grads);
    if (p.size() != g.size()) throw DimensionError("adam: gradient layout differs from parameters");
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (S v : g[i].values) {
        if (!std::isfinite(static_cast<double>(v))) {
          throw DivergenceError("adam: non-finite gradient in " + g[i].name + " at step " +
                                std::to_string(state_.step + 1));
        }
      }
    }
    if (state_.first.empty()) {
      for (const auto& view : p) {
        state_.first.push_back(Vector<S>::Zero(static_cast<Index>(view.values.size())));
        state_.second.push_back(Vector<S>::Zero(static_cast<Index>(view.values.size())));
      }
    }
    if (state_.first.size() != p.size()) throw DimensionError("adam: state layout differs from parameters");

    ++state_.step;
    const double b1 = options_.beta1;
    const double b2 = options_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state_.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state_.step));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (static_cast<Index>(p[i].values.size()) != state_.first[i].size() ||
          p[i].values.size() != g[i].values.size()) {
        throw DimensionError("adam: shape mismatch in " + p[i].name);
      }
      S* w = p[i].values.data();
      const S* gi = g[i].values.data();
      S* m = state_.first[i].data();
      S* v = state_.second[i].data();
      for (std::size_t k = 0; k < p[i].values.size(); ++k) {
        const double grad = gi[k];
        const double mk = b1 * m[k] + (1.0 - b1) * grad;
        const double vk = b2 * v[k] + (1.0 - b2) * grad * grad;
        m[k] = static_cast<S>(mk);
        v[k] = static_cast<S>(vk);
        const double m_hat = mk / c1;
        const double v_hat = vk / c2;
        w[k] = static_cast<S>(w[k] - options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon));
      }
    }
  }

 private:
  AdamOptions options_;
  AdamState<S> state_;
};

}  // namespace smdn

#endif  // SMDN_ADAM_HPP_

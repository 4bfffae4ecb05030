// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_GRAD_CHECK_HPP_
#define SMDN_GRAD_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <type_traits>
#include <vector>

#include "smdn/random.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Central-difference check of `analytic` against `loss` at `params`.
/// Checks every coordinate when there are at most `max_coords`, otherwise a
/// seeded sample of `max_coords` distinct ones. Relative error per coordinate
/// is |a - c| / max(|a|, |c|, 1e-12).
inline GradCheckResult grad_check(const std::function<double(const Eigen::VectorXd&)>& loss,
                                  const Eigen::VectorXd& params, const Eigen::VectorXd& analytic,
                                  double eps = 1e-5, std::size_t max_coords = 100, std::uint64_t seed = 0) {
  if (params.size() != analytic.size()) throw DimensionError("grad_check: gradient size mismatch");
  std::vector<Index> coords(static_cast<std::size_t>(params.size()));
  std::iota(coords.begin(), coords.end(), Index{0});
  if (coords.size() > max_coords) {
    Rng rng = Rng::derive(seed, 0x67726164ULL);
    for (std::size_t i = 0; i < max_coords; ++i) {
      std::swap(coords[i], coords[i + rng.below(coords.size() - i)]);
    }
    coords.resize(max_coords);
  }

  GradCheckResult result;
  Eigen::VectorXd probe = params;
  for (Index c : coords) {
    const double saved = probe[c];
    probe[c] = saved + eps;
    const double up = loss(probe);
    probe[c] = saved - eps;
    const double down = loss(probe);
    probe[c] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic[c];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
    if (rel > result.max_rel_error || result.worst_index < 0) {
      result.max_rel_error = rel;
      result.worst_index = c;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
    ++result.coordinates;
  }
  return result;
}

/// Gradient check of a network objective `fn(net, grad_or_null) -> loss`
/// at double precision.
template <typename Net, typename LossFn>
GradCheckResult check_network_gradient(const Net& net, LossFn&& fn, std::size_t max_coords = 100,
                                       std::uint64_t seed = 0, double eps = 1e-5) {
  static_assert(std::is_same_v<typename Net::Scalar, double>, "gradient checks run at double precision");
  Net grad = zeros_like(net);
  fn(net, &grad);
  const Eigen::VectorXd analytic = flatten(grad);
  auto loss = [&](const Eigen::VectorXd& v) {
    Net probe = net;
    unflatten(probe, v);
    return fn(static_cast<const Net&>(probe), static_cast<Net*>(nullptr));
  };
  return grad_check(loss, flatten(net), analytic, eps, max_coords, seed);
}

}  // namespace smdn

#endif  // SMDN_GRAD_CHECK_HPP_

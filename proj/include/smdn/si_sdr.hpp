// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_SI_SDR_HPP_
#define SMDN_SI_SDR_HPP_

#include <cmath>
#include <numbers>

#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

/// Magnitude bound on reported SI-SDR, in dB.
inline constexpr double kSiSdrCap = 100.0;

/// Scale-invariant SDR of `est` against `ref`, in dB:
///   alpha = <est, ref> / <ref, ref>,  SI-SDR = 10 log10(|alpha ref|^2 / |alpha ref - est|^2).
/// Saturates at +/-kSiSdrCap when either energy is below 1e-10 of the other,
/// where the gradient is zero. Accumulates in double regardless of Scalar.
/// When `d_est` is non-null it receives dSI-SDR/d est.
template <typename DerivedE, typename DerivedR>
double si_sdr(const Eigen::MatrixBase<DerivedE>& est, const Eigen::MatrixBase<DerivedR>& ref,
              Vector<typename DerivedE::Scalar>* d_est = nullptr) {
  using S = typename DerivedE::Scalar;
  if (est.size() != ref.size()) throw DimensionError("si_sdr: estimate and reference lengths differ");
  const Eigen::VectorXd e = est.template cast<double>().reshaped();
  const Eigen::VectorXd r = ref.template cast<double>().reshaped();
  const double ref_energy = r.squaredNorm();
  if (!(ref_energy > 0.0)) throw DomainError("si_sdr: reference has zero energy");
  const double inner = e.dot(r);
  const double alpha = inner / ref_energy;
  const Eigen::VectorXd residual = e - alpha * r;
  const double target_energy = alpha * alpha * ref_energy;
  const double residual_energy = residual.squaredNorm();

  auto saturate = [&](double value) {
    if (d_est) *d_est = Vector<S>::Zero(est.size());
    return value;
  };
  if (target_energy <= 1e-10 * residual_energy) return saturate(-kSiSdrCap);
  if (residual_energy < 1e-10 * target_energy) return saturate(kSiSdrCap);

  if (d_est) {
    const double k = 10.0 / std::numbers::ln10;
    *d_est = (k * (2.0 / inner * r - 2.0 / residual_energy * residual)).template cast<S>();
  }
  return 10.0 * std::log10(target_energy / residual_energy);
}

}  // namespace smdn

#endif  // SMDN_SI_SDR_HPP_

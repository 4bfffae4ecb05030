// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Short-time Fourier analysis/synthesis with a periodic Hann window at
// quarter-frame hop, plus ratio-mask helpers. Spectrograms are stored
// bins x frames so each frame is a contiguous column.

#ifndef SMDN_STFT_HPP_
#define SMDN_STFT_HPP_

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

struct StftConfig {
  Index frame_size = 1024;
  Index hop = 256;
  int sample_rate = 8000;

  Index bins() const { return frame_size / 2 + 1; }

  void validate() const {
    if (frame_size < 8 || frame_size % 4 != 0) throw ConfigError("stft: frame size must be a multiple of 4");
    if (hop * 4 != frame_size) throw ConfigError("stft: hop must be a quarter of the frame size");
  }

  /// Frames produced for `length` samples, no padding.
  Index num_frames(Index length) const { return length < frame_size ? 0 : 1 + (length - frame_size) / hop; }

  /// Samples covered by `frames` analysis frames.
  Index analyzed_length(Index frames) const { return frames == 0 ? 0 : (frames - 1) * hop + frame_size; }
};

template <typename S>
Vector<S> hann_window(Index n) {
  Vector<S> w(n);
  for (Index i = 0; i < n; ++i) {
    w[i] = static_cast<S>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  return w;
}

template <typename S>
struct Spectrogram {
  ComplexMatrix<S> frames;  // bins x T
  StftConfig config;

  Index num_frames() const { return frames.cols(); }
  Index bins() const { return frames.rows(); }
  Matrix<S> magnitude() const { return frames.cwiseAbs(); }
};

namespace detail {

template <typename S>
Eigen::FFT<S>& half_spectrum_fft() {
  thread_local Eigen::FFT<S> fft = [] {
    Eigen::FFT<S> f;
    f.SetFlag(Eigen::FFT<S>::HalfSpectrum);
    return f;
  }();
  return fft;
}

// Overlap-added squared window, floored away from zero near the edges.
template <typename S>
Vector<S> window_sum(const StftConfig& cfg, Index frames, const Vector<S>& window) {
  const Index len = cfg.analyzed_length(frames);
  Vector<S> sum = Vector<S>::Zero(len);
  for (Index t = 0; t < frames; ++t) sum.segment(t * cfg.hop, cfg.frame_size) += window.cwiseAbs2();
  // Interior value of the overlap-added Hann^2 at quarter hop is 3/8 * frame/hop = 1.5.
  const S floor = static_cast<S>(1e-2 * 0.375 * static_cast<double>(cfg.frame_size) / static_cast<double>(cfg.hop));
  return sum.cwiseMax(floor);
}

}  // namespace detail

template <typename Derived>
Spectrogram<typename Derived::Scalar> stft(const Eigen::MatrixBase<Derived>& x, const StftConfig& cfg) {
  using S = typename Derived::Scalar;
  cfg.validate();
  if (x.size() < cfg.frame_size) {
    throw LengthError("stft: signal of " + std::to_string(x.size()) + " samples is shorter than one frame (" +
                      std::to_string(cfg.frame_size) + ")");
  }
  const Index frames = cfg.num_frames(x.size());
  const Vector<S> window = hann_window<S>(cfg.frame_size);
  Spectrogram<S> spec;
  spec.config = cfg;
  spec.frames.resize(cfg.bins(), frames);
  auto& fft = detail::half_spectrum_fft<S>();
  std::vector<S> buf(static_cast<std::size_t>(cfg.frame_size));
  std::vector<std::complex<S>> out;
  for (Index t = 0; t < frames; ++t) {
    for (Index i = 0; i < cfg.frame_size; ++i) buf[static_cast<std::size_t>(i)] = window[i] * x(t * cfg.hop + i);
    fft.fwd(out, buf);
    for (Index k = 0; k < cfg.bins(); ++k) spec.frames(k, t) = out[static_cast<std::size_t>(k)];
  }
  return spec;
}

/// Weighted overlap-add synthesis normalized by the overlap-added squared
/// window. Output length is the analyzed length of the spectrogram.
template <typename S>
Vector<S> istft(const Spectrogram<S>& spec) {
  const StftConfig& cfg = spec.config;
  cfg.validate();
  if (spec.bins() != cfg.bins()) throw DimensionError("istft: bin count does not match config");
  const Index frames = spec.num_frames();
  const Vector<S> window = hann_window<S>(cfg.frame_size);
  Vector<S> y = Vector<S>::Zero(cfg.analyzed_length(frames));
  if (frames == 0) return y;
  auto& fft = detail::half_spectrum_fft<S>();
  std::vector<std::complex<S>> in(static_cast<std::size_t>(cfg.bins()));
  std::vector<S> frame;
  for (Index t = 0; t < frames; ++t) {
    for (Index k = 0; k < cfg.bins(); ++k) in[static_cast<std::size_t>(k)] = spec.frames(k, t);
    fft.inv(frame, in, cfg.frame_size);
    for (Index i = 0; i < cfg.frame_size; ++i) y[t * cfg.hop + i] += window[i] * frame[static_cast<std::size_t>(i)];
  }
  return y.cwiseQuotient(detail::window_sum<S>(cfg, frames, window));
}

/// Gradient of L(istft(m * X)) with respect to the real mask m, given
/// dL/dy for the reconstruction y.
template <typename S>
Matrix<S> istft_mask_gradient(const Spectrogram<S>& noisy, const Vector<S>& d_y) {
  const StftConfig& cfg = noisy.config;
  const Index frames = noisy.num_frames();
  if (d_y.size() != cfg.analyzed_length(frames)) throw DimensionError("istft_mask_gradient: gradient length");
  const Vector<S> window = hann_window<S>(cfg.frame_size);
  const Vector<S> scaled = d_y.cwiseQuotient(detail::window_sum<S>(cfg, frames, window));
  auto& fft = detail::half_spectrum_fft<S>();
  std::vector<S> buf(static_cast<std::size_t>(cfg.frame_size));
  std::vector<std::complex<S>> q;
  Matrix<S> grad(cfg.bins(), frames);
  const S inv_n = S(1) / static_cast<S>(cfg.frame_size);
  const Index nyquist = cfg.bins() - 1;
  for (Index t = 0; t < frames; ++t) {
    for (Index i = 0; i < cfg.frame_size; ++i) buf[static_cast<std::size_t>(i)] = window[i] * scaled[t * cfg.hop + i];
    fft.fwd(q, buf);
    for (Index k = 0; k < cfg.bins(); ++k) {
      const S fold = (k == 0 || k == nyquist) ? S(1) : S(2);
      grad(k, t) = fold * inv_n * std::real(noisy.frames(k, t) * std::conj(q[static_cast<std::size_t>(k)]));
    }
  }
  return grad;
}

/// Ideal ratio mask |S| / (|S| + |N|); 0.5 where both vanish.
template <typename S>
Matrix<S> irm_target(const Matrix<S>& mag_speech, const Matrix<S>& mag_noise) {
  if (mag_speech.rows() != mag_noise.rows() || mag_speech.cols() != mag_noise.cols()) {
    throw DimensionError("irm_target: magnitude shapes differ");
  }
  if ((mag_speech.array() < S(0)).any() || (mag_noise.array() < S(0)).any()) {
    throw DomainError("irm_target: magnitudes must be non-negative");
  }
  Matrix<S> mask(mag_speech.rows(), mag_speech.cols());
  for (Index i = 0; i < mask.size(); ++i) {
    const double s = mag_speech.data()[i];
    const double total = s + static_cast<double>(mag_noise.data()[i]);
    mask.data()[i] = total < 1e-12 ? S(0.5) : static_cast<S>(std::clamp(s / total, 0.0, 1.0));
  }
  return mask;
}

/// Real mask applied to the complex spectrum; the noisy phase is kept.
template <typename S>
Spectrogram<S> apply_mask(const Spectrogram<S>& noisy, const Matrix<S>& mask) {
  if (mask.rows() != noisy.bins() || mask.cols() != noisy.num_frames()) {
    throw DimensionError("apply_mask: mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) +
                         ", spectrogram is " + std::to_string(noisy.bins()) + "x" + std::to_string(noisy.num_frames()));
  }
  Spectrogram<S> out;
  out.config = noisy.config;
  out.frames = noisy.frames.cwiseProduct(mask.template cast<std::complex<S>>());
  return out;
}

/// Fixed log compression applied to magnitudes before any network sees them.
template <typename S>
Matrix<S> compress_magnitude(const Matrix<S>& mag) {
  return mag.array().log1p().matrix();
}

}  // namespace smdn

#endif  // SMDN_STFT_HPP_

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Double-bias GRU layer:
//
//   r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   z  = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//   n  = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
//
// The three input-side (and hidden-side) gate matrices are stored stacked in
// row blocks [reset; update; candidate] so a whole sequence's input projection
// is one matrix product.

#ifndef SMDN_GRU_HPP_
#define SMDN_GRU_HPP_

#include <cmath>
#include <string>

#include "smdn/activations.hpp"
#include "smdn/random.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

template <typename S>
struct GruLayer {
  using Scalar = S;

  Matrix<S> w_input;   // 3H x in
  Matrix<S> w_hidden;  // 3H x H
  Vector<S> b_input;   // 3H
  Vector<S> b_hidden;  // 3H

  static GruLayer zeros(Index input, Index hidden) {
    GruLayer g;
    g.w_input = Matrix<S>::Zero(3 * hidden, input);
    g.w_hidden = Matrix<S>::Zero(3 * hidden, hidden);
    g.b_input = Vector<S>::Zero(3 * hidden);
    g.b_hidden = Vector<S>::Zero(3 * hidden);
    return g;
  }

  /// All weights and biases uniform in [-1/sqrt(H), 1/sqrt(H)].
  static GruLayer uniform(Index input, Index hidden, Rng& rng) {
    GruLayer g = zeros(input, hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    g.visit([&](const std::string&, auto& t) {
      for (Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
    });
    return g;
  }

  Index input_size() const { return w_input.cols(); }
  Index hidden_size() const { return w_hidden.cols(); }

  // Gate blocks: 0 = reset, 1 = update, 2 = candidate.
  auto w_i(int gate) { return w_input.middleRows(gate * hidden_size(), hidden_size()); }
  auto w_h(int gate) { return w_hidden.middleRows(gate * hidden_size(), hidden_size()); }
  auto bi(int gate) { return b_input.segment(gate * hidden_size(), hidden_size()); }
  auto bh(int gate) { return b_hidden.segment(gate * hidden_size(), hidden_size()); }

  template <typename F>
  void visit(F&& f) {
    f("W_i", w_input);
    f("W_h", w_hidden);
    f("b_i", b_input);
    f("b_h", b_hidden);
  }
  template <typename F>
  void visit(F&& f) const {
    f("W_i", w_input);
    f("W_h", w_hidden);
    f("b_i", b_input);
    f("b_h", b_hidden);
  }
};

/// Intermediate values kept by gru_forward for backpropagation through time.
template <typename S>
struct GruTrace {
  Matrix<S> states;       // H x (T+1), column 0 is the initial state
  Matrix<S> reset;        // H x T
  Matrix<S> update;       // H x T
  Matrix<S> candidate;    // H x T
  Matrix<S> hidden_cand;  // H x T, W_hn h + b_hn
};

namespace detail {

template <typename S>
void check_gru_shapes(const GruLayer<S>& p, Index input_rows) {
  const Index h = p.hidden_size();
  if (p.w_input.rows() != 3 * h || p.w_hidden.rows() != 3 * h || p.b_input.size() != 3 * h ||
      p.b_hidden.size() != 3 * h) {
    throw DimensionError("gru: inconsistent parameter shapes");
  }
  if (input_rows != p.input_size()) {
    throw DimensionError("gru: input has " + std::to_string(input_rows) + " rows, layer expects " +
                         std::to_string(p.input_size()));
  }
}

// One recurrence given the precomputed input projection `xi` (3H).
template <typename S, typename XiDerived>
void gru_cell(const GruLayer<S>& p, const Eigen::MatrixBase<XiDerived>& xi, const Vector<S>& h, Vector<S>& h_next,
              Vector<S>& r, Vector<S>& z, Vector<S>& n, Vector<S>& hn) {
  const Index H = p.hidden_size();
  Vector<S> hh = p.b_hidden;
  hh.noalias() += p.w_hidden * h;
  r = sigmoid((xi.segment(0, H) + hh.segment(0, H)).eval());
  z = sigmoid((xi.segment(H, H) + hh.segment(H, H)).eval());
  hn = hh.segment(2 * H, H);
  n = (xi.segment(2 * H, H) + r.cwiseProduct(hn)).array().tanh().matrix();
  h_next = (S(1) - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);
}

}  // namespace detail

template <typename S>
Vector<S> gru_step(const Vector<S>& x, const Vector<S>& h, const GruLayer<S>& p) {
  detail::check_gru_shapes(p, x.size());
  if (h.size() != p.hidden_size()) throw DimensionError("gru_step: hidden state size");
  Vector<S> xi = p.b_input;
  xi.noalias() += p.w_input * x;
  Vector<S> h_next, r, z, n, hn;
  detail::gru_cell(p, xi, h, h_next, r, z, n, hn);
  return h_next;
}

/// Runs the layer over the columns of `x` (in x T) from a zero initial state.
/// Returns H x T hidden states; fills `trace` when given.
template <typename S>
Matrix<S> gru_forward(const GruLayer<S>& p, const Matrix<S>& x, GruTrace<S>* trace = nullptr) {
  detail::check_gru_shapes(p, x.rows());
  const Index H = p.hidden_size();
  const Index T = x.cols();
  Matrix<S> xi = p.w_input * x;
  xi.colwise() += p.b_input;

  Matrix<S> out(H, T);
  if (trace) {
    trace->states.resize(H, T + 1);
    trace->states.col(0).setZero();
    trace->reset.resize(H, T);
    trace->update.resize(H, T);
    trace->candidate.resize(H, T);
    trace->hidden_cand.resize(H, T);
  }
  Vector<S> h = Vector<S>::Zero(H);
  Vector<S> h_next, r, z, n, hn;
  for (Index t = 0; t < T; ++t) {
    detail::gru_cell(p, xi.col(t), h, h_next, r, z, n, hn);
    h.swap(h_next);
    out.col(t) = h;
    if (trace) {
      trace->states.col(t + 1) = h;
      trace->reset.col(t) = r;
      trace->update.col(t) = z;
      trace->candidate.col(t) = n;
      trace->hidden_cand.col(t) = hn;
    }
  }
  return out;
}

namespace testing {
/// Relative error injected into the reset-gate term of gru_backward. Zero in
/// production; the property suite sets it to confirm the gradient check bites.
inline double gru_backward_mutation = 0.0;
}  // namespace testing

/// Backpropagation through the full sequence. `d_out` is dL/d(hidden states),
/// H x T. Parameter gradients accumulate into `grad`; dL/dx goes to `dx` when
/// non-null.
template <typename S>
void gru_backward(const GruLayer<S>& p, const Matrix<S>& x, const GruTrace<S>& trace, const Matrix<S>& d_out,
                  GruLayer<S>& grad, Matrix<S>* dx = nullptr) {
  const Index H = p.hidden_size();
  const Index T = x.cols();
  if (d_out.rows() != H || d_out.cols() != T) throw DimensionError("gru_backward: d_out shape");

  Matrix<S> d_xi(3 * H, T);
  Matrix<S> d_hh(3 * H, T);
  Vector<S> dh_next = Vector<S>::Zero(H);
  for (Index t = T - 1; t >= 0; --t) {
    const auto r = trace.reset.col(t).array();
    const auto z = trace.update.col(t).array();
    const auto n = trace.candidate.col(t).array();
    const auto h_prev = trace.states.col(t).array();
    const Vector<S> dh = d_out.col(t) + dh_next;

    const auto dn = dh.array() * (S(1) - z);
    const auto dz = dh.array() * (h_prev - n);
    const Vector<S> da_n = dn * (S(1) - n * n);
    const Vector<S> da_z = dz * z * (S(1) - z);
    Vector<S> da_r = (da_n.array() * trace.hidden_cand.col(t).array() * r * (S(1) - r)).matrix();
    if (testing::gru_backward_mutation != 0.0) da_r *= static_cast<S>(1.0 + testing::gru_backward_mutation);

    d_xi.col(t).segment(0, H) = da_r;
    d_xi.col(t).segment(H, H) = da_z;
    d_xi.col(t).segment(2 * H, H) = da_n;
    d_hh.col(t).segment(0, H) = da_r;
    d_hh.col(t).segment(H, H) = da_z;
    d_hh.col(t).segment(2 * H, H) = da_n.cwiseProduct(trace.reset.col(t));

    dh_next = (dh.array() * z).matrix();
    dh_next.noalias() += p.w_hidden.transpose() * d_hh.col(t);
  }
  grad.w_input.noalias() += d_xi * x.transpose();
  grad.b_input += d_xi.rowwise().sum();
  grad.w_hidden.noalias() += d_hh * trace.states.leftCols(T).transpose();
  grad.b_hidden += d_hh.rowwise().sum();
  if (dx) *dx = p.w_input.transpose() * d_xi;
}

}  // namespace smdn

#endif  // SMDN_GRU_HPP_

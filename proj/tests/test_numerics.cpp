// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smdn/adam.hpp"
#include "smdn/checkpoint.hpp"
#include "smdn/dense.hpp"
#include "smdn/grad_check.hpp"
#include "smdn/gru.hpp"
#include "smdn/losses.hpp"

using namespace smdn;

namespace {

// Single-tensor network used to drive Adam and the checkpoint writer.
template <typename S>
struct Scalars {
  using Scalar = S;
  Vector<S> w;
  template <typename F>
  void visit(F&& f) {
    f("w", w);
  }
  template <typename F>
  void visit(F&& f) const {
    f("w", w);
  }
};

Eigen::MatrixXd random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

}  // namespace

TEST_CASE("dense_forward examples") {
  SUBCASE("identity weights pass the input through") {
    Dense<double> d = Dense<double>::zeros(2, 2);
    d.weight.setIdentity();
    const Eigen::VectorXd x = Eigen::Vector2d(1, 0);
    const Eigen::MatrixXd y = dense_forward(x, d, Activation::kIdentity);
    CHECK(y(0, 0) == 1.0);
    CHECK(y(1, 0) == 0.0);
  }
  SUBCASE("zero weights under softmax give the uniform distribution") {
    Dense<double> d = Dense<double>::zeros(3, 2);
    const Eigen::VectorXd x = Eigen::Vector3d(4, -1, 7);
    const Eigen::MatrixXd y = dense_forward(x, d, Activation::kSoftmax);
    CHECK(y(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(y(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("sigmoid of 2*1+1") {
    Dense<double> d = Dense<double>::zeros(1, 1);
    d.weight(0, 0) = 2.0;
    d.bias[0] = 1.0;
    const Eigen::MatrixXd y = dense_forward(Eigen::VectorXd::Ones(1), d, Activation::kSigmoid);
    CHECK(y(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-3.0))).epsilon(1e-15));
    CHECK(y(0, 0) == doctest::Approx(0.9525741268224334).epsilon(1e-15));
  }
  SUBCASE("shape mismatch is a dimension error") {
    Dense<double> d = Dense<double>::zeros(3, 2);
    CHECK_THROWS_AS(dense_forward(Eigen::VectorXd::Ones(2), d, Activation::kIdentity), DimensionError);
  }
}

TEST_CASE("softmax outputs lie strictly inside the simplex") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd logits = random_matrix(7, 1, rng, 4.0);
    const Eigen::MatrixXd p = softmax(logits);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK((p.array() > 0.0).all());
    CHECK((p.array() < 1.0).all());
  }
}

TEST_CASE("gru_step examples") {
  SUBCASE("zero parameters with h=1 give 0.5") {
    const auto p = GruLayer<double>::zeros(3, 1);
    const Eigen::VectorXd h = gru_step(Eigen::VectorXd(Eigen::Vector3d(0.3, -2, 9)), Eigen::VectorXd(Eigen::VectorXd::Ones(1)), p);
    CHECK(h[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("zero parameters with h=0 stay exactly at 0") {
    const auto p = GruLayer<double>::zeros(4, 3);
    const Eigen::VectorXd h = gru_step(Eigen::VectorXd(Eigen::VectorXd::Constant(4, 5.0)), Eigen::VectorXd(Eigen::VectorXd::Zero(3)), p);
    CHECK((h.array() == 0.0).all());
  }
  SUBCASE("saturated update gate copies the previous state") {
    auto p = GruLayer<double>::zeros(2, 1);
    p.bi(1).setConstant(50.0);
    p.bh(1).setConstant(50.0);
    p.bi(2).setConstant(3.0);
    const Eigen::VectorXd h = gru_step(Eigen::VectorXd(Eigen::Vector2d(1, 1)), Eigen::VectorXd(Eigen::VectorXd::Ones(1)), p);
    CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hand-evaluated gate equations") {
    Rng rng(3);
    auto p = GruLayer<double>::uniform(2, 2, rng);
    const Eigen::Vector2d x(0.4, -0.7);
    const Eigen::Vector2d h(0.2, 0.5);
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    Eigen::Vector2d expected;
    for (int j = 0; j < 2; ++j) {
      const double r = sig(p.w_i(0).row(j).dot(x) + p.bi(0)[j] + p.w_h(0).row(j).dot(h) + p.bh(0)[j]);
      const double z = sig(p.w_i(1).row(j).dot(x) + p.bi(1)[j] + p.w_h(1).row(j).dot(h) + p.bh(1)[j]);
      const double n = std::tanh(p.w_i(2).row(j).dot(x) + p.bi(2)[j] + r * (p.w_h(2).row(j).dot(h) + p.bh(2)[j]));
      expected[j] = (1 - z) * n + z * h[j];
    }
    const Eigen::VectorXd got = gru_step(Eigen::VectorXd(x), Eigen::VectorXd(h), p);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("sequence forward agrees with repeated steps") {
    Rng rng(5);
    auto p = GruLayer<double>::uniform(3, 4, rng);
    const Eigen::MatrixXd x = random_matrix(3, 6, rng);
    const Eigen::MatrixXd out = gru_forward(p, x);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(4);
    for (Index t = 0; t < 6; ++t) h = gru_step(Eigen::VectorXd(x.col(t)), h, p);
    CHECK((out.col(5) - h).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("shape mismatch") {
    const auto p = GruLayer<double>::zeros(3, 2);
    CHECK_THROWS_AS(gru_step(Eigen::VectorXd(Eigen::VectorXd::Zero(2)), Eigen::VectorXd(Eigen::VectorXd::Zero(2)), p), DimensionError);
  }
}

TEST_CASE("bce_loss examples") {
  CHECK(bce_loss(1.0 - 1e-7, 1) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(bce_loss(1.0, 1) < 1.1e-7);  // clamped, finite
  CHECK(bce_loss(0.5, 1) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(bce_loss(0.5, 0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(std::isfinite(bce_loss(0.0, 1)));
  CHECK_THROWS_AS(bce_loss(0.5, 2), DomainError);
}

TEST_CASE("adam_update examples") {
  SUBCASE("first step with unit gradient") {
    Adam<double> adam({1e-3});
    Scalars<double> w{Eigen::VectorXd::Zero(1)};
    Scalars<double> g{Eigen::VectorXd::Ones(1)};
    adam.update(w, g);
    CHECK(w.w[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-12));
    CHECK(adam.state().step == 1);
  }
  SUBCASE("zero gradient from zero moments leaves parameters unchanged") {
    Adam<double> adam({1e-3});
    Rng rng(1);
    Scalars<double> w{random_matrix(5, 1, rng)};
    const Eigen::VectorXd before = w.w;
    adam.update(w, Scalars<double>{Eigen::VectorXd::Zero(5)});
    CHECK(w.w == before);
    CHECK((adam.state().second[0].array() >= 0).all());
  }
  SUBCASE("constant gradient gives equal consecutive steps") {
    Adam<double> adam({1e-3});
    Scalars<double> w{Eigen::VectorXd::Zero(1)};
    const Scalars<double> g{Eigen::VectorXd::Constant(1, 0.37)};
    adam.update(w, g);
    const double step1 = w.w[0];
    adam.update(w, g);
    const double step2 = w.w[0] - step1;
    CHECK(std::abs(step2) == doctest::Approx(std::abs(step1)).epsilon(1e-9));
  }
  SUBCASE("non-finite gradient is a divergence") {
    Adam<double> adam;
    Scalars<double> w{Eigen::VectorXd::Zero(2)};
    Scalars<double> g{Eigen::VectorXd::Zero(2)};
    g.w[1] = std::nan("");
    CHECK_THROWS_AS(adam.update(w, g), DivergenceError);
  }
}

TEST_CASE("grad_check examples") {
  SUBCASE("quadratic") {
    auto f = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
    const auto r = grad_check(f, Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 6.0));
    CHECK(r.max_rel_error < 1e-9);
  }
  SUBCASE("sine") {
    auto f = [](const Eigen::VectorXd& v) { return std::sin(v[0]); };
    const auto r = grad_check(f, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, std::cos(1.0)));
    CHECK(std::cos(1.0) == doctest::Approx(0.5403023058681398));
    CHECK(r.max_rel_error < 1e-8);
  }
  SUBCASE("a wrong gradient is caught") {
    auto f = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
    const auto r = grad_check(f, Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 6.1));
    CHECK(r.max_rel_error > 1e-3);
  }
}

TEST_CASE("dense backward matches finite differences for every activation") {
  Rng rng(21);
  for (Activation act : {Activation::kIdentity, Activation::kSigmoid, Activation::kSoftmax}) {
    const Dense<double> layer = Dense<double>::uniform(5, 4, rng);
    const Eigen::MatrixXd x = random_matrix(5, 3, rng);
    const Eigen::MatrixXd c = random_matrix(4, 3, rng);
    auto fn = [&](const Dense<double>& d, Dense<double>* grad) {
      const Eigen::MatrixXd y = dense_forward(x, d, act);
      if (grad) dense_backward(x, y, c, d, act, *grad);
      return y.cwiseProduct(c).sum();
    };
    const auto r = check_network_gradient(layer, fn, 100, 1);
    CHECK(r.max_rel_error <= 1e-4);
  }
}

TEST_CASE("gru backward matches finite differences, including the input gradient") {
  Rng rng(8);
  const auto layer = GruLayer<double>::uniform(4, 3, rng);
  const Eigen::MatrixXd x = random_matrix(4, 5, rng);
  const Eigen::MatrixXd c = random_matrix(3, 5, rng);
  auto fn = [&](const GruLayer<double>& p, GruLayer<double>* grad) {
    GruTrace<double> trace;
    const Eigen::MatrixXd h = gru_forward(p, x, grad ? &trace : nullptr);
    if (grad) gru_backward(p, x, trace, c, *grad);
    return h.cwiseProduct(c).sum();
  };
  CHECK(check_network_gradient(layer, fn, 200, 2).max_rel_error <= 1e-4);

  // Input gradient against the same objective.
  GruTrace<double> trace;
  gru_forward(layer, x, &trace);
  GruLayer<double> scratch = zeros_like(layer);
  Eigen::MatrixXd dx;
  gru_backward(layer, x, trace, c, scratch, &dx);
  auto loss_x = [&](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd xv = v.reshaped(4, 5);
    return gru_forward(layer, xv).cwiseProduct(c).sum();
  };
  const auto r = grad_check(loss_x, x.reshaped(), dx.reshaped());
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("bce and cross-entropy gradients") {
  SUBCASE("bce on a logit") {
    for (double logit : {-2.5, -0.1, 0.0, 0.7, 3.0}) {
      for (int y : {0, 1}) {
        auto f = [y](const Eigen::VectorXd& v) { return bce_with_logit(v[0], y).loss; };
        const auto r = grad_check(f, Eigen::VectorXd::Constant(1, logit),
                                  Eigen::VectorXd::Constant(1, bce_with_logit(logit, y).grad));
        CHECK(r.max_rel_error <= 1e-4);
      }
    }
  }
  SUBCASE("scaled cross entropy") {
    Rng rng(4);
    const Eigen::VectorXd logits = random_matrix(5, 1, rng);
    for (double scale : {1.0, 10.0}) {
      Eigen::VectorXd d;
      cross_entropy(logits, 2, scale, &d);
      auto f = [scale](const Eigen::VectorXd& v) { return cross_entropy(v, 2, scale); };
      CHECK(grad_check(f, logits, d).max_rel_error <= 1e-4);
    }
    CHECK_THROWS_AS(cross_entropy(logits, 5, 1.0), DomainError);
  }
}

TEST_CASE("forward and backward are deterministic") {
  Rng a(99);
  Rng b(99);
  const auto la = GruLayer<float>::uniform(6, 4, a);
  const auto lb = GruLayer<float>::uniform(6, 4, b);
  CHECK(flatten(la) == flatten(lb));
  Rng rx(5);
  Eigen::MatrixXf x(6, 7);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rx.normal());
  GruTrace<float> ta, tb;
  const Eigen::MatrixXf ha = gru_forward(la, x, &ta);
  const Eigen::MatrixXf hb = gru_forward(lb, x, &tb);
  CHECK(ha == hb);
  auto ga = zeros_like(la);
  auto gb = zeros_like(lb);
  gru_backward(la, x, ta, ha, ga);
  gru_backward(lb, x, tb, hb, gb);
  CHECK(flatten(ga) == flatten(gb));
}

TEST_CASE("checkpoint container") {
  Rng rng(17);
  ParamStore store;
  const auto gf = GruLayer<float>::uniform(5, 3, rng);
  const auto dd = Dense<double>::uniform(3, 2, rng);
  store.add_net(gf, "embed.gru1.");
  store.add_net(dd, "gate.classifier.");

  SUBCASE("encode/decode/encode is byte-identical and restores values") {
    for (int trial = 0; trial < 5; ++trial) {
      const std::string bytes = encode_checkpoint(store);
      CHECK(bytes.substr(0, 4) == "SMDN");
      const ParamStore back = decode_checkpoint(bytes);
      CHECK(encode_checkpoint(back) == bytes);
      GruLayer<float> g2;
      back.load_net(g2, "embed.gru1.");
      CHECK(flatten(g2) == flatten(gf));
      Dense<double> d2;
      back.load_net(d2, "gate.classifier.");
      CHECK(d2.weight == dd.weight);
    }
  }
  SUBCASE("row-major little-endian layout") {
    ParamStore s;
    Scalars<double> v{Eigen::Vector2d(1.0, -2.0)};
    s.add_net(v, "x.");
    const std::string bytes = encode_checkpoint(s);
    // magic(4) version(4) count(4) namelen(4) "x.w"(3) dtype(1) rank(4) dim(8) data(16)
    CHECK(bytes.size() == 4 + 4 + 4 + 4 + 3 + 1 + 4 + 8 + 16);
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);
    CHECK(bytes[19] == 1);  // f64 tag
  }
  SUBCASE("corrupt inputs are rejected") {
    std::string bytes = encode_checkpoint(store);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
    CHECK_THROWS_AS(decode_checkpoint("XXXX" + bytes.substr(4)), FormatError);
    CHECK_THROWS_AS(decode_checkpoint(bytes + "z"), FormatError);
    GruLayer<float> g;
    CHECK_THROWS_AS(store.load_net(g, "missing."), FormatError);
  }
}

// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smdn/grad_check.hpp"
#include "smdn/random.hpp"
#include "smdn/stft.hpp"

using namespace smdn;

namespace {

Eigen::VectorXd noise(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

double interior_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Index frame) {
  double worst = 0.0;
  for (Index i = frame; i <= y.size() - frame; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

}  // namespace

TEST_CASE("stft framing") {
  const StftConfig cfg;
  CHECK(cfg.bins() == 513);
  CHECK(stft(Eigen::VectorXd::Zero(8192), cfg).num_frames() == 29);
  CHECK(stft(Eigen::VectorXd::Zero(40000), cfg).num_frames() == 153);
  CHECK(cfg.analyzed_length(153) == 39936);
  CHECK(stft(Eigen::VectorXd::Zero(1024), cfg).num_frames() == 1);
  CHECK_THROWS_AS(stft(Eigen::VectorXd::Zero(1023), cfg), LengthError);
  CHECK_THROWS_AS(stft(Eigen::VectorXd::Zero(2048), StftConfig{1024, 512, 8000}), ConfigError);
}

TEST_CASE("constant signal") {
  // The periodic Hann window's own transform is N/2 at bin 0 and -N/4 at
  // bin 1, so a constant input puts half of bin 0's magnitude in bin 1 and
  // nothing above it.
  const auto spec = stft(Eigen::VectorXd::Ones(4096), StftConfig{});
  const Eigen::MatrixXd mag = spec.magnitude();
  for (Index t = 0; t < spec.num_frames(); ++t) {
    CHECK(mag(0, t) == doctest::Approx(512.0).epsilon(1e-12));
    CHECK(mag(1, t) == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(mag.col(t).tail(511).maxCoeff() <= 1e-10 * mag(0, t));
  }
}

TEST_CASE("250 Hz sine peaks at bin 32") {
  Eigen::VectorXd x(8000);
  for (Index i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * 250.0 * static_cast<double>(i) / 8000.0);
  const Eigen::MatrixXd mag = stft(x, StftConfig{}).magnitude();
  for (Index t = 0; t < mag.cols(); ++t) {
    Index peak = 0;
    mag.col(t).maxCoeff(&peak);
    CHECK(peak == 32);
  }
}

TEST_CASE("istft perfect reconstruction on interior samples") {
  const StftConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd x = noise(40000, seed);
    const Eigen::VectorXd y = istft(stft(x, cfg));
    CHECK(y.size() == 39936);
    CHECK(interior_error(x, y, cfg.frame_size) <= 1e-6);
  }
  SUBCASE("all-zero spectrogram gives silence") {
    Spectrogram<double> s;
    s.frames = ComplexMatrix<double>::Zero(513, 10);
    CHECK(istft(s).isZero(0.0));
  }
  SUBCASE("unit mask leaves the round trip unchanged") {
    const auto spec = stft(noise(20000, 9), cfg);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(513, spec.num_frames());
    CHECK(istft(apply_mask(spec, ones)) == istft(spec));
  }
}

TEST_CASE("stft is linear") {
  const Eigen::VectorXd x = noise(6000, 4);
  const auto a = stft(x, StftConfig{});
  const auto b = stft(Eigen::VectorXd(-3.25 * x), StftConfig{});
  const double rel = (b.frames + 3.25 * a.frames).cwiseAbs().maxCoeff() / b.frames.cwiseAbs().maxCoeff();
  CHECK(rel <= 1e-10);
}

TEST_CASE("irm_target examples") {
  Eigen::MatrixXd s(1, 4), n(1, 4);
  s << 2.0, 5.0, 3.0, 0.0;
  n << 2.0, 0.0, 1.0, 0.0;
  const Eigen::MatrixXd m = irm_target(s, n);
  CHECK(m(0, 0) == 0.5);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(0, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m(0, 3) == 0.5);
  Eigen::MatrixXd bad = n;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(irm_target(s, bad), DomainError);

  const auto speech = stft(noise(8000, 1), StftConfig{}).magnitude();
  const auto other = stft(noise(8000, 2), StftConfig{}).magnitude();
  const Eigen::MatrixXd mask = irm_target(speech, other);
  CHECK((mask.array() >= 0.0).all());
  CHECK((mask.array() <= 1.0).all());
}

TEST_CASE("apply_mask examples") {
  Spectrogram<double> x;
  x.frames.resize(513, 2);
  Rng rng(3);
  for (Index i = 0; i < x.frames.size(); ++i) x.frames.data()[i] = {rng.normal(), rng.normal()};
  CHECK(apply_mask(x, Eigen::MatrixXd(Eigen::MatrixXd::Ones(513, 2))).frames == x.frames);
  CHECK(apply_mask(x, Eigen::MatrixXd(Eigen::MatrixXd::Zero(513, 2))).frames.isZero(0.0));

  x.frames(7, 1) = std::polar(2.0, 0.8);
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(513, 2, 0.5);
  const auto y = apply_mask(x, half);
  CHECK(std::abs(y.frames(7, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::arg(y.frames(7, 1)) == doctest::Approx(0.8).epsilon(1e-15));

  Eigen::MatrixXd random_mask(513, 2);
  for (auto& v : random_mask.reshaped()) v = rng.uniform(1e-3, 1.0);
  const auto z = apply_mask(x, random_mask);
  for (Index i = 0; i < z.frames.size(); ++i) {
    CHECK(std::arg(z.frames.data()[i]) == doctest::Approx(std::arg(x.frames.data()[i])).epsilon(1e-12));
  }
  CHECK_THROWS_AS(apply_mask(x, Eigen::MatrixXd(Eigen::MatrixXd::Ones(513, 3))), DimensionError);
}

TEST_CASE("mask gradient through the reconstruction") {
  const StftConfig cfg{16, 4, 8000};
  const Eigen::VectorXd x = noise(40, 12);
  const Eigen::VectorXd weights = noise(cfg.analyzed_length(cfg.num_frames(40)), 13);
  const auto spec = stft(x, cfg);
  Rng rng(2);
  Eigen::MatrixXd mask(spec.bins(), spec.num_frames());
  for (auto& v : mask.reshaped()) v = rng.uniform(0.1, 0.9);

  const Eigen::MatrixXd analytic = istft_mask_gradient(spec, weights);
  auto loss = [&](const Eigen::VectorXd& flat) {
    return istft(apply_mask(spec, Eigen::MatrixXd(flat.reshaped(mask.rows(), mask.cols())))).dot(weights);
  };
  const auto r = grad_check(loss, mask.reshaped(), analytic.reshaped(), 1e-5, 1000);
  CHECK(r.coordinates == static_cast<std::size_t>(mask.size()));
  CHECK(r.max_rel_error <= 1e-6);
}

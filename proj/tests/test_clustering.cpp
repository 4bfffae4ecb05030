// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <limits>

#include "doctest.h"
#include "smdn/clustering.hpp"
#include "smdn/errors.hpp"
#include "smdn/random.hpp"

using namespace smdn;

namespace {

Eigen::MatrixXd random_points(Index n, Index d, Rng& rng) {
  Eigen::MatrixXd x(n, d);
  for (auto& v : x.reshaped()) v = rng.normal();
  return x;
}

// Exhaustive 2-partition optimum; both sides non-empty.
double brute_force_two(const Eigen::MatrixXd& x) {
  const Index n = x.rows();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double cost = 0.0;
    for (int side = 0; side < 2; ++side) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.cols());
      int count = 0;
      for (Index i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
          mean += x.row(i).transpose();
          ++count;
        }
      }
      mean /= count;
      for (Index i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) == static_cast<unsigned>(side)) cost += (x.row(i).transpose() - mean).squaredNorm();
      }
    }
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace

TEST_CASE("speaker_means examples") {
  std::map<std::string, std::vector<Eigen::VectorXd>> e;
  e["a"] = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
  e["b"] = {Eigen::Vector2d(3.0, -2.0)};
  const auto m = speaker_means(e);
  CHECK(m.speakers == std::vector<std::string>{"a", "b"});
  CHECK(m.means.row(0) == Eigen::RowVector2d(0.5, 0.5));
  CHECK(m.means.row(1) == Eigen::RowVector2d(3.0, -2.0));
  CHECK(m.counts == std::vector<int>{2, 1});

  Rng rng(1);
  std::map<std::string, std::vector<Eigen::VectorXd>> ten;
  long double oracle[32] = {};
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd z(32);
    for (int j = 0; j < 32; ++j) {
      z[j] = rng.normal();
      oracle[j] += z[j];
    }
    ten["s"].push_back(z);
  }
  const auto m10 = speaker_means(ten);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(m10.means(0, j) - static_cast<double>(oracle[j] / 10)) <= 1e-12);

  e["c"] = {};
  CHECK_THROWS_AS(speaker_means(e), ConfigError);
}

TEST_CASE("kmeans examples") {
  Rng rng(2);
  const Eigen::MatrixXd x = random_points(12, 3, rng);
  const auto one = kmeans(x, 1);
  CHECK((one.centroids.row(0) - x.colwise().mean()).norm() <= 1e-12);

  Eigen::MatrixXd masses(6, 2);
  masses << 0, 0, 0, 0, 0, 0, 5, 5, 5, 5, 5, 5;
  const auto two = kmeans(masses, 2);
  CHECK(two.objective == 0.0);
  CHECK(two.labels[0] != two.labels[3]);

  CHECK_THROWS_AS(kmeans(x, 13), DomainError);
}

TEST_CASE("kmeans matches the exhaustive optimum for N=8, K=2") {
  Rng rng(3);
  for (int instance = 0; instance < 20; ++instance) {
    const Eigen::MatrixXd x = random_points(8, 32, rng);
    KMeansOptions o;
    o.seed = static_cast<std::uint64_t>(instance);
    CHECK(kmeans(x, 2, o).objective == doctest::Approx(brute_force_two(x)).epsilon(1e-12));
  }
}

TEST_CASE("Lloyd objective never increases") {
  Rng rng(4);
  for (int instance = 0; instance < 10; ++instance) {
    const Eigen::MatrixXd x = random_points(60, 4, rng);
    KMeansOptions o;
    o.restarts = 1;
    o.seed = static_cast<std::uint64_t>(instance);
    const auto r = kmeans(x, 5, o);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12);
    CHECK(r.objective <= r.trace.back() + 1e-12);
  }
}

TEST_CASE("empty clusters are re-seeded") {
  // Four identical points and K=3: seeding can only pick duplicates.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 2);
  x.row(4) << 1.0, 0.0;
  const auto r = kmeans(x, 3);
  std::vector<int> sizes(3, 0);
  for (int l : r.labels) ++sizes[static_cast<std::size_t>(l)];
  for (int s : sizes) CHECK(s > 0);
}

TEST_CASE("cluster model persistence and label matching") {
  SpeakerMeans means;
  means.speakers = {"a", "b", "c"};
  means.means = Eigen::MatrixXd::Identity(3, 3);
  means.counts = {1, 1, 1};
  KMeansResult km;
  km.centroids = Eigen::MatrixXd::Random(2, 3);
  km.labels = {0, 1, 1};
  const auto m = make_cluster_model(means, km, "abc123");
  const auto back = parse_cluster_model(cluster_model_json(m));
  CHECK(back.k == 2);
  CHECK(back.centroids == m.centroids);
  CHECK(back.assignment == m.assignment);
  CHECK(back.sv_checkpoint_hash == "abc123");
  CHECK(back.label_of("b") == 1);
  CHECK_THROWS_AS(back.label_of("z"), ConfigError);
  CHECK_THROWS_AS(parse_cluster_model("{\"K\": 2}"), FormatError);
  km.labels = {0, 0, 0};
  CHECK_THROWS_AS(make_cluster_model(means, km, ""), ConfigError);

  CHECK(matched_agreement({0, 0, 1, 1}, {1, 1, 0, 0}, 2) == 4);
  CHECK(matched_agreement({0, 0, 1, 1}, {1, 1, 0, 1}, 2) == 3);
}

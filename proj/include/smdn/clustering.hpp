// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_CLUSTERING_HPP_
#define SMDN_CLUSTERING_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smdn/tensor.hpp"

namespace smdn {

struct SpeakerMeans {
  std::vector<std::string> speakers;  // sorted
  Eigen::MatrixXd means;              // one row per speaker
  std::vector<int> counts;
};

/// Element-wise mean of each speaker's embeddings. Throws ConfigError for a
/// speaker without embeddings and DimensionError on ragged sizes.
SpeakerMeans speaker_means(const std::map<std::string, std::vector<Eigen::VectorXd>>& embeddings);

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  std::uint64_t seed = 1;
};

struct KMeansResult {
  Eigen::MatrixXd centroids;  // K x d
  std::vector<int> labels;
  double objective = 0.0;  // within-cluster sum of squares
  int iterations = 0;      // Lloyd iterations of the winning restart
  std::vector<double> trace;  // objective after each iteration of the winning restart
};

/// Within-cluster sum of squared Euclidean distances.
double wcss(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, const std::vector<int>& labels);

/// Index of the nearest centroid; ties go to the lowest index.
int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& x);

/// k-means++ seeding, Lloyd iterations to a fixed point (or the iteration
/// cap), empty clusters re-seeded at the point farthest from its centroid,
/// best of `restarts` by objective. Throws DomainError when N < K.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& options = {});

struct ClusterModel {
  int k = 0;
  Eigen::MatrixXd centroids;
  std::map<std::string, int> assignment;
  std::string sv_checkpoint_hash;

  int label_of(const std::string& speaker) const;
};

ClusterModel make_cluster_model(const SpeakerMeans& means, const KMeansResult& km, const std::string& sv_hash);

std::string cluster_model_json(const ClusterModel& model);
ClusterModel parse_cluster_model(const std::string& text);
void save_cluster_model(const ClusterModel& model, const std::string& path);
ClusterModel load_cluster_model(const std::string& path);

/// Largest number of items on which two labelings agree under a relabeling of
/// the second (exhaustive over permutations, so K stays small).
int matched_agreement(const std::vector<int>& a, const std::vector<int>& b, int k);

}  // namespace smdn

#endif  // SMDN_CLUSTERING_HPP_

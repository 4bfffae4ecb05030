// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "smdn/errors.hpp"
#include "smdn/random.hpp"

namespace smdn {

using nlohmann::json;

SpeakerMeans speaker_means(const std::map<std::string, std::vector<Eigen::VectorXd>>& embeddings) {
  SpeakerMeans out;
  Index dim = -1;
  for (const auto& [speaker, list] : embeddings) {
    if (list.empty()) throw ConfigError("speaker_means: speaker " + speaker + " has no embeddings");
    if (dim < 0) dim = list.front().size();
  }
  out.means.resize(static_cast<Index>(embeddings.size()), std::max<Index>(dim, 0));
  Index row = 0;
  for (const auto& [speaker, list] : embeddings) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (const auto& z : list) {
      if (z.size() != dim) throw DimensionError("speaker_means: embedding sizes differ");
      sum += z;
    }
    out.means.row(row++) = (sum / static_cast<double>(list.size())).transpose();
    out.speakers.push_back(speaker);
    out.counts.push_back(static_cast<int>(list.size()));
  }
  return out;
}

double wcss(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, const std::vector<int>& labels) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace {

Eigen::MatrixXd plus_plus_seed(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  c.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2[pick];
        if (r < 0.0) break;
      }
      while (d2[pick] == 0.0 && pick > 0) --pick;  // never land on a zero-weight point
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    c.row(j) = x.row(pick);
    for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (x.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd c, int max_iterations) {
  const Index n = x.rows();
  const int k = static_cast<int>(c.rows());
  KMeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      const int l = nearest_centroid(c, x.row(i).transpose());
      if (l != r.labels[static_cast<std::size_t>(i)]) {
        r.labels[static_cast<std::size_t>(i)] = l;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++sizes[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    for (int j = 0; j < k; ++j) {
      if (sizes[static_cast<std::size_t>(j)] > 0) {
        c.row(j) = sums.row(j) / sizes[static_cast<std::size_t>(j)];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its own centroid.
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = (x.row(i) - c.row(r.labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d && sizes[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] > 1) {
          far_d = d;
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(far)])];
      r.labels[static_cast<std::size_t>(far)] = j;
      sizes[static_cast<std::size_t>(j)] = 1;
      c.row(j) = x.row(far);
    }
    // Centroids of clusters that donated a point are recomputed on the next pass.
    r.trace.push_back(wcss(x, c, r.labels));
    r.iterations = it + 1;
  }
  // Final centroids are exact means of the final labels.
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
    ++sizes[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
  }
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) c.row(j) = sums.row(j) / sizes[static_cast<std::size_t>(j)];
  }
  r.centroids = c;
  r.objective = wcss(x, c, r.labels);
  return r;
}

// Single-point transfers that lower the objective once centroid motion is
// accounted for. A Lloyd fixed point can still admit such moves.
void hartigan_refine(const Eigen::MatrixXd& x, KMeansResult& r) {
  const Index n = x.rows();
  const Index k = r.centroids.rows();
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : r.labels) ++sizes[static_cast<std::size_t>(l)];
  for (bool moved = true; moved;) {
    moved = false;
    for (Index i = 0; i < n; ++i) {
      const int from = r.labels[static_cast<std::size_t>(i)];
      const int na = sizes[static_cast<std::size_t>(from)];
      if (na < 2) continue;
      const double leave = na / (na - 1.0) * (x.row(i) - r.centroids.row(from)).squaredNorm();
      int to = from;
      double best_gain = 1e-12 * (1.0 + leave);
      for (Index j = 0; j < k; ++j) {
        if (j == from) continue;
        const int nb = sizes[static_cast<std::size_t>(j)];
        const double join = nb / (nb + 1.0) * (x.row(i) - r.centroids.row(j)).squaredNorm();
        if (leave - join > best_gain) {
          best_gain = leave - join;
          to = static_cast<int>(j);
        }
      }
      if (to == from) continue;
      const int nb = sizes[static_cast<std::size_t>(to)];
      r.centroids.row(from) = (na * r.centroids.row(from) - x.row(i)) / (na - 1.0);
      r.centroids.row(to) = (nb * r.centroids.row(to) + x.row(i)) / (nb + 1.0);
      --sizes[static_cast<std::size_t>(from)];
      ++sizes[static_cast<std::size_t>(to)];
      r.labels[static_cast<std::size_t>(i)] = to;
      r.trace.push_back(wcss(x, r.centroids, r.labels));
      moved = true;
    }
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
  for (Index i = 0; i < n; ++i) sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
  for (Index j = 0; j < k; ++j) r.centroids.row(j) = sums.row(j) / sizes[static_cast<std::size_t>(j)];
  r.objective = wcss(x, r.centroids, r.labels);
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& o) {
  if (k < 1) throw DomainError("kmeans: K must be positive");
  if (points.rows() < k) throw DomainError("kmeans: fewer points than clusters");
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < std::max(1, o.restarts); ++restart) {
    Rng rng = Rng::derive(o.seed, 0x6b6d65616e73ULL, static_cast<std::uint64_t>(restart));
    KMeansResult r = lloyd(points, plus_plus_seed(points, k, rng), o.max_iterations);
    hartigan_refine(points, r);
    if (r.objective < best.objective) best = std::move(r);
  }
  return best;
}

int ClusterModel::label_of(const std::string& speaker) const {
  const auto it = assignment.find(speaker);
  if (it == assignment.end()) throw ConfigError("cluster model: no label for speaker " + speaker);
  return it->second;
}

ClusterModel make_cluster_model(const SpeakerMeans& means, const KMeansResult& km, const std::string& sv_hash) {
  ClusterModel m;
  m.k = static_cast<int>(km.centroids.rows());
  m.centroids = km.centroids;
  for (std::size_t i = 0; i < means.speakers.size(); ++i) m.assignment[means.speakers[i]] = km.labels[i];
  std::vector<int> sizes(static_cast<std::size_t>(m.k), 0);
  for (int l : km.labels) ++sizes[static_cast<std::size_t>(l)];
  if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) throw ConfigError("cluster model: empty cluster");
  m.sv_checkpoint_hash = sv_hash;
  return m;
}

std::string cluster_model_json(const ClusterModel& m) {
  json centroids = json::array();
  for (Index r = 0; r < m.centroids.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.centroids.cols(); ++c) row.push_back(m.centroids(r, c));
    centroids.push_back(row);
  }
  json out = {{"K", m.k}, {"centroids", centroids}, {"assignment", m.assignment},
              {"sv_checkpoint_hash", m.sv_checkpoint_hash}};
  return out.dump(2) + "\n";
}

ClusterModel parse_cluster_model(const std::string& text) {
  try {
    const json j = json::parse(text);
    ClusterModel m;
    m.k = j.at("K").get<int>();
    const auto& rows = j.at("centroids");
    if (static_cast<int>(rows.size()) != m.k || m.k < 1) throw FormatError("cluster model: centroid count != K");
    m.centroids.resize(m.k, static_cast<Index>(rows[0].size()));
    for (int r = 0; r < m.k; ++r) {
      if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(m.centroids.cols())) {
        throw FormatError("cluster model: ragged centroids");
      }
      for (Index c = 0; c < m.centroids.cols(); ++c) m.centroids(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    m.assignment = j.at("assignment").get<std::map<std::string, int>>();
    for (const auto& [speaker, label] : m.assignment) {
      if (label < 0 || label >= m.k) throw FormatError("cluster model: label out of range for " + speaker);
    }
    m.sv_checkpoint_hash = j.value("sv_checkpoint_hash", "");
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("cluster model: ") + e.what());
  }
}

void save_cluster_model(const ClusterModel& model, const std::string& path) {
  std::ofstream out(path);
  out << cluster_model_json(model);
  if (!out) throw ConfigError("cluster model: cannot write " + path);
}

ClusterModel load_cluster_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cluster model: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cluster_model(ss.str());
}

int matched_agreement(const std::vector<int>& a, const std::vector<int>& b, int k) {
  if (a.size() != b.size()) throw DimensionError("matched_agreement: length mismatch");
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (b[i] >= 0 && b[i] < k && a[i] == perm[static_cast<std::size_t>(b[i])]) ++agree;
    }
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace smdn

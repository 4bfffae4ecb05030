// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/stages.hpp"

namespace smdn {

namespace {

constexpr std::uint64_t kSvInit = 0x737630ULL;
constexpr std::uint64_t kSvSamples = 0x737631ULL;
constexpr std::uint64_t kRenderings = 0x72656e64ULL;

}  // namespace

double pair_accuracy(const EmbedNet<Real>& net, const std::vector<PreparedPair>& pairs) {
  if (pairs.empty()) throw ConfigError("pair_accuracy: no pairs");
  int correct = 0;
  for (const auto& p : pairs) {
    const int said_same = sv_similarity(embed(p.a, net), embed(p.b, net)) >= 0.5 ? 1 : 0;
    correct += said_same == p.same ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

EmbedNet<Real> train_sv(const SvSetup& setup, const TrainOptions& o, const StftConfig& cfg, TrainResult* result,
                        const LogSink& log) {
  Rng init = Rng::derive(o.seed, kSvInit);
  EmbedNet<Real> net = EmbedNet<Real>::uniform(cfg.bins(), kEmbeddingSize, init);
  auto sample = [&](const EmbedNet<Real>& n, int step, int index, EmbedNet<Real>* grad) {
    Rng rng = Rng::derive(o.seed, kSvSamples,
                          static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(o.batch) +
                              static_cast<std::uint64_t>(index));
    const PairSample p = sample_pair(setup.pool, setup.noises, rng);
    return siamese_pair_loss(n, prepare(p.a, cfg).mag, prepare(p.b, cfg).mag, p.same, grad);
  };
  auto validate = [&](const EmbedNet<Real>& n) { return pair_accuracy(n, setup.validation); };
  TrainResult r = train_loop(net, sample, validate, o, log);
  if (result) *result = r;
  return net;
}

std::map<std::string, std::vector<Eigen::VectorXd>> embed_speakers(const EmbedNet<Real>& net,
                                                                   const std::vector<const Utterance*>& utterances,
                                                                   const std::vector<const NoiseClip*>& noises,
                                                                   int renderings, std::uint64_t seed,
                                                                   const StftConfig& cfg) {
  std::map<std::string, std::vector<Eigen::VectorXd>> out;
  for (std::size_t u = 0; u < utterances.size(); ++u) {
    for (int r = 0; r < renderings; ++r) {
      Rng rng = Rng::derive(seed, kRenderings, u * 1000 + static_cast<std::size_t>(r));
      const Prepared p = prepare(draw_mixture(*utterances[u], noises, rng), cfg);
      out[utterances[u]->speaker].push_back(embed(p.mag, net).cast<double>());
    }
  }
  return out;
}

}  // namespace smdn

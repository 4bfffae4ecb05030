// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/evaluate.hpp"

#include <cmath>
#include <sstream>

namespace smdn {

namespace {

constexpr std::uint64_t kTestUniform = 0x74737431ULL;
constexpr std::uint64_t kTestFixed = 0x74737432ULL;

std::string snr_tag(double snr) {
  std::ostringstream s;
  s << "snr" << snr;
  return s.str();
}

EvalRecord base_record(const std::string& model, const Prepared& p, const std::string& stratum,
                       const Matrix<Real>& mask) {
  EvalRecord r;
  r.model = model;
  r.utterance = p.utterance;
  r.speaker = p.speaker;
  r.stratum = stratum;
  r.snr_db = p.snr_db;
  r.input_sisdr = si_sdr(p.mixture, p.clean);
  r.output_sisdr = si_sdr(masked_reconstruction(p.noisy, mask), p.clean);
  r.sisdri = r.output_sisdr - r.input_sisdr;
  return r;
}

}  // namespace

void EvalReport::append(const EvalReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  summaries.insert(summaries.end(), other.summaries.begin(), other.summaries.end());
}

TestSet make_test_set(const std::vector<const Utterance*>& pool, const std::vector<const NoiseClip*>& noises,
                      int uniform, int per_snr, std::uint64_t seed, const StftConfig& cfg) {
  TestSet set;
  for (int i = 0; i < uniform; ++i) {
    Rng rng = Rng::derive(seed, kTestUniform, static_cast<std::uint64_t>(i));
    set.mixtures.push_back(prepare(draw_mixture(pool, noises, rng), cfg));
    set.strata.push_back("uniform");
  }
  for (std::size_t s = 0; s < kFixedSnrs.size(); ++s) {
    for (int i = 0; i < per_snr; ++i) {
      Rng rng = Rng::derive(seed, kTestFixed, s * 100000 + static_cast<std::size_t>(i));
      // Same utterance/noise/segment sampling as draw_mixture, then remixed
      // at the fixed SNR.
      MixtureSample m = draw_mixture(pool, noises, rng);
      MixtureSample fixed = mix(m.clean, m.noise, kFixedSnrs[s]);
      fixed.speaker_id = m.speaker_id;
      fixed.utterance_id = m.utterance_id;
      fixed.noise_id = m.noise_id;
      set.mixtures.push_back(prepare(fixed, cfg));
      set.strata.push_back(snr_tag(kFixedSnrs[s]));
    }
  }
  return set;
}

EvalReport evaluate_denoiser(const std::string& name, const DenoiseNet<Real>& net, const TestSet& set) {
  EvalReport report;
  for (std::size_t i = 0; i < set.mixtures.size(); ++i) {
    const Prepared& p = set.mixtures[i];
    report.records.push_back(base_record(name, p, set.strata[i], denoise(p.mag, net)));
  }
  ModelSummary shape;
  shape.model = name;
  shape.hidden = static_cast<int>(net.hidden_size());
  shape.total_params = param_count(net);
  shape.effective_params = shape.total_params;
  report.summaries = summarize(report.records, {shape});
  return report;
}

EvalReport evaluate_ensemble(const std::string& name, const EnsembleNet<Real>& model, const TestSet& set,
                             const std::map<std::string, int>& reference_labels, double lambda) {
  EvalReport report;
  for (std::size_t i = 0; i < set.mixtures.size(); ++i) {
    const Prepared& p = set.mixtures[i];
    const HardOutput<Real> out = forward_hard(p.mag, model, static_cast<Real>(lambda));
    EvalRecord r = base_record(name, p, set.strata[i], out.mask);
    r.k_star = static_cast<int>(out.selected);
    double h = 0.0;
    for (Index k = 0; k < out.probs.size(); ++k) {
      const double pk = out.probs[k];
      if (pk > 0.0) h -= pk * std::log(pk);
    }
    r.gate_entropy = h;
    report.records.push_back(r);
  }
  ModelSummary shape;
  shape.model = name;
  shape.k = static_cast<int>(model.clusters());
  shape.hidden = static_cast<int>(model.specialists.front().hidden_size());
  shape.total_params = param_count(model);
  shape.effective_params = param_count(model.gate) + param_count(model.specialists.front());
  report.summaries = summarize(report.records, {shape}, reference_labels);
  return report;
}

EvalReport evaluate_identity(const TestSet& set) {
  EvalReport report;
  for (std::size_t i = 0; i < set.mixtures.size(); ++i) {
    const Prepared& p = set.mixtures[i];
    report.records.push_back(base_record("identity", p, set.strata[i], Matrix<Real>::Ones(p.mag.rows(), p.mag.cols())));
  }
  ModelSummary shape;
  shape.model = "identity";
  report.summaries = summarize(report.records, {shape});
  return report;
}

std::map<std::string, int> nearest_centroid_labels(const std::map<std::string, std::vector<Eigen::VectorXd>>& embeddings,
                                                   const ClusterModel& clusters) {
  const SpeakerMeans means = speaker_means(embeddings);
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < means.speakers.size(); ++i) {
    out[means.speakers[i]] = nearest_centroid(clusters.centroids, means.means.row(static_cast<Index>(i)).transpose());
  }
  return out;
}

std::vector<ModelSummary> summarize(const std::vector<EvalRecord>& records, const std::vector<ModelSummary>& shapes,
                                    const std::map<std::string, int>& reference_labels) {
  std::vector<ModelSummary> out;
  for (ModelSummary s : shapes) {
    double total = 0.0;
    std::size_t n = 0;
    std::size_t routed = 0;
    std::size_t correct = 0;
    for (const auto& r : records) {
      if (r.model != s.model) continue;
      total += r.sisdri;
      ++n;
      const auto it = reference_labels.find(r.speaker);
      if (r.k_star >= 0 && it != reference_labels.end()) {
        ++routed;
        correct += r.k_star == it->second ? 1 : 0;
      }
    }
    s.records = n;
    s.mean_sisdri = n ? total / static_cast<double>(n) : 0.0;
    if (routed > 0) s.gate_accuracy = static_cast<double>(correct) / static_cast<double>(routed);
    out.push_back(s);
  }
  return out;
}

}  // namespace smdn

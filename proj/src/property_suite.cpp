// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/property_suite.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "smdn/checkpoint.hpp"
#include "smdn/clustering.hpp"
#include "smdn/ensemble.hpp"
#include "smdn/grad_check.hpp"
#include "smdn/mixing.hpp"
#include "smdn/wav.hpp"

namespace smdn {

namespace {

Eigen::MatrixXd gaussian(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (auto& v : m.reshaped()) v = scale * rng.normal();
  return m;
}

Eigen::VectorXd gaussian(Index n, Rng& rng, double scale = 1.0) { return gaussian(n, 1, rng, scale).col(0); }

template <typename S = double>
Matrix<S> random_mag(Index bins, Index frames, Rng& rng, double scale) {
  return gaussian(bins, frames, rng, scale).cwiseAbs().cast<S>();
}

bool at_most(double measured, double tol) { return measured <= tol; }

double dense_gradient() {
  Rng rng(21);
  double worst = 0.0;
  for (Activation act : {Activation::kIdentity, Activation::kSigmoid, Activation::kSoftmax}) {
    const Dense<double> layer = Dense<double>::uniform(5, 4, rng);
    const Eigen::MatrixXd x = gaussian(5, 3, rng);
    const Eigen::MatrixXd c = gaussian(4, 3, rng);
    auto fn = [&](const Dense<double>& d, Dense<double>* grad) {
      const Eigen::MatrixXd y = dense_forward(x, d, act);
      if (grad) dense_backward(x, y, c, d, act, *grad);
      return y.cwiseProduct(c).sum();
    };
    worst = std::max(worst, check_network_gradient(layer, fn, 100, 1).max_rel_error);
  }
  return worst;
}

double gru_gradient() {
  Rng rng(8);
  const auto layer = GruLayer<double>::uniform(4, 3, rng);
  const Eigen::MatrixXd x = gaussian(4, 5, rng);
  const Eigen::MatrixXd c = gaussian(3, 5, rng);
  auto fn = [&](const GruLayer<double>& p, GruLayer<double>* grad) {
    GruTrace<double> trace;
    const Eigen::MatrixXd h = gru_forward(p, x, grad ? &trace : nullptr);
    if (grad) gru_backward(p, x, trace, c, *grad);
    return h.cwiseProduct(c).sum();
  };
  const double params = check_network_gradient(layer, fn, 200, 2).max_rel_error;

  GruTrace<double> trace;
  gru_forward(layer, x, &trace);
  GruLayer<double> scratch = zeros_like(layer);
  Eigen::MatrixXd dx;
  gru_backward(layer, x, trace, c, scratch, &dx);
  auto loss_x = [&](const Eigen::VectorXd& v) {
    return gru_forward(layer, Eigen::MatrixXd(v.reshaped(4, 5))).cwiseProduct(c).sum();
  };
  return std::max(params, grad_check(loss_x, x.reshaped(), dx.reshaped()).max_rel_error);
}

double gru_mutation() {
  testing::gru_backward_mutation = 1e-3;
  double measured = 0.0;
  try {
    measured = gru_gradient();
  } catch (...) {
    testing::gru_backward_mutation = 0.0;
    throw;
  }
  testing::gru_backward_mutation = 0.0;
  return measured;
}

double bce_gradient() {
  double worst = 0.0;
  for (double logit : {-2.5, -0.1, 0.0, 0.7, 3.0}) {
    for (int y : {0, 1}) {
      auto f = [y](const Eigen::VectorXd& v) { return bce_with_logit(v[0], y).loss; };
      worst = std::max(worst, grad_check(f, Eigen::VectorXd::Constant(1, logit),
                                         Eigen::VectorXd::Constant(1, bce_with_logit(logit, y).grad))
                                  .max_rel_error);
    }
  }
  return worst;
}

double cross_entropy_gradient() {
  Rng rng(4);
  const Eigen::VectorXd logits = gaussian(5, rng);
  double worst = 0.0;
  for (double scale : {1.0, 10.0}) {
    Eigen::VectorXd d;
    cross_entropy(logits, 2, scale, &d);
    auto f = [scale](const Eigen::VectorXd& v) { return cross_entropy(v, 2, scale); };
    worst = std::max(worst, grad_check(f, logits, d).max_rel_error);
  }
  return worst;
}

double siamese_gradient() {
  Rng rng(6);
  const auto net = EmbedNet<double>::uniform(513, 8, rng);
  const Eigen::MatrixXd ma = random_mag(513, 4, rng, 0.1);
  const Eigen::MatrixXd mb = random_mag(513, 5, rng, 0.1);
  double worst = 0.0;
  for (int y : {0, 1}) {
    auto fn = [&](const EmbedNet<double>& n, EmbedNet<double>* g) { return siamese_pair_loss(n, ma, mb, y, g); };
    worst = std::max(worst, check_network_gradient(net, fn, 150, 11 + y).max_rel_error);
  }
  return worst;
}

// Composite paths use a narrow STFT so that finite differences of an O(1)
// loss stay well above rounding noise.
double denoiser_gradient() {
  Rng rng(2);
  const StftConfig cfg{32, 8, 8000};
  const Index samples = cfg.analyzed_length(3);
  const Eigen::VectorXd clean = gaussian(samples, rng);
  const auto noisy = stft(Eigen::VectorXd(clean + gaussian(samples, rng)), cfg);
  const auto net = DenoiseNet<double>::uniform(cfg.bins(), 6, rng);
  auto fn = [&](const DenoiseNet<double>& n, DenoiseNet<double>* g) { return enhancement_loss(n, noisy, clean, g); };
  return check_network_gradient(net, fn, 200, 7).max_rel_error;
}

double ensemble_gradient() {
  Rng rng(19);
  const StftConfig cfg{16, 4, 8000};
  const Index samples = cfg.analyzed_length(3);
  const Eigen::VectorXd clean = gaussian(samples, rng);
  const auto noisy = stft(Eigen::VectorXd(clean + gaussian(samples, rng)), cfg);
  EnsembleNet<double> model;
  model.gate = GateNet<double>::uniform(EmbedNet<double>::uniform(cfg.bins(), 6, rng), 2, rng);
  for (int k = 0; k < 2; ++k) model.specialists.push_back(DenoiseNet<double>::uniform(cfg.bins(), 5, rng));
  double worst = 0.0;
  for (double lambda : {kPretrainLambda, kFinetuneLambda}) {
    auto fn = [&](const EnsembleNet<double>& m, EnsembleNet<double>* g) {
      return ensemble_loss(m, noisy, clean, lambda, g);
    };
    worst = std::max(worst, check_network_gradient(model, fn, 100, 19).max_rel_error);
  }
  return worst;
}

double stft_round_trip() {
  const StftConfig cfg;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng = Rng::derive(31, 0, s);
    const Eigen::VectorXd x = gaussian(40000, rng);
    const Eigen::VectorXd y = istft(stft(x, cfg));
    for (Index i = cfg.frame_size; i <= y.size() - cfg.frame_size; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  return worst;
}

double sine_peak_bin() {
  Eigen::VectorXd x(8000);
  for (Index i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * 250.0 * static_cast<double>(i) / 8000.0);
  const Eigen::MatrixXd mag = stft(x, StftConfig{}).magnitude();
  double worst = 0.0;
  for (Index t = 0; t < mag.cols(); ++t) {
    Index peak = 0;
    mag.col(t).maxCoeff(&peak);
    worst = std::max(worst, std::abs(static_cast<double>(peak) - 32.0));
  }
  return worst;
}

double si_sdr_scale_invariance() {
  Rng rng(1);
  const Eigen::VectorXd ref = gaussian(4000, rng);
  const Eigen::VectorXd est = ref + gaussian(4000, rng, 0.7);
  const double base = si_sdr(est, ref);
  double worst = 0.0;
  for (double a : {1e-3, 0.5, 3.0, 1e4}) {
    worst = std::max(worst, std::abs(si_sdr(Eigen::VectorXd(a * est), ref) - base));
    worst = std::max(worst, std::abs(si_sdr(Eigen::VectorXd(a * est), Eigen::VectorXd(a * ref)) - base));
  }
  return worst;
}

double si_sdr_orthogonal() {
  Rng rng(2);
  const Eigen::VectorXd ref = gaussian(4000, rng);
  Eigen::VectorXd w = gaussian(4000, rng);
  w -= (w.dot(ref) / ref.squaredNorm()) * ref;
  w *= std::sqrt(ref.squaredNorm() / (100.0 * w.squaredNorm()));
  return std::abs(si_sdr(Eigen::VectorXd(ref + w), ref) - 20.0);
}

double mixing_snr() {
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Index n = 200 + static_cast<Index>(rng.below(4000));
    const Waveform s = gaussian(n, rng, rng.uniform(0.01, 1.0));
    const Waveform v = gaussian(n, rng, rng.uniform(0.01, 1.0));
    const double snr = rng.uniform(kMinSnrDb, kMaxSnrDb);
    const MixtureSample m = mix(s, v, snr);
    worst = std::max(worst, std::abs(measured_snr_db(m.clean, m.noise) - snr));
  }
  return worst;
}

double mixing_additivity() {
  Rng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const MixtureSample m = mix(gaussian(500, rng), gaussian(500, rng), rng.uniform(kMinSnrDb, kMaxSnrDb));
    worst = std::max(worst, (m.mixture - m.clean - m.noise).cwiseAbs().maxCoeff());
  }
  return worst;
}

double kmeans_exhaustive() {
  double worst = 0.0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Rng rng = Rng::derive(41, 0, inst);
    const Eigen::MatrixXd x = gaussian(8, 32, rng);
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < 255; ++mask) {
      double total = 0.0;
      for (unsigned side : {0u, 1u}) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(32);
        int n = 0;
        for (int i = 0; i < 8; ++i) {
          if (((mask >> i) & 1u) == side) {
            mean += x.row(i);
            ++n;
          }
        }
        mean /= n;
        for (int i = 0; i < 8; ++i) {
          if (((mask >> i) & 1u) == side) total += (x.row(i) - mean).squaredNorm();
        }
      }
      best = std::min(best, total);
    }
    KMeansOptions o;
    o.seed = inst;
    worst = std::max(worst, (kmeans(x, 2, o).objective - best) / best);
  }
  return worst;
}

double parameter_accounting() {
  return std::abs(static_cast<double>(param_count(DenoiseNet<float>::zeros(513, 256))) - 1118721.0);
}

double total_vs_reported() { return std::abs(static_cast<double>(param_counts(5, 256).total) - 5.6e6) / 5.6e6; }

double effective_reduction() {
  return 1.0 - static_cast<double>(param_counts(10, 64).effective) / static_cast<double>(denoiser_param_count(512));
}

EnsembleNet<Real> routing_model(Rng& rng, double classifier_scale) {
  EnsembleNet<Real> model;
  model.gate = GateNet<Real>::uniform(EmbedNet<Real>::uniform(513, 32, rng), 3, rng);
  model.gate.classifier.weight *= static_cast<Real>(classifier_scale);
  for (int k = 0; k < 3; ++k) model.specialists.push_back(DenoiseNet<Real>::uniform(513, 8, rng));
  return model;
}

double hard_routing_identity() {
  Rng rng(51);
  const EnsembleNet<Real> model = routing_model(rng, 1.0);
  double mismatches = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix<Real> mag = random_mag<Real>(513, 1 + static_cast<Index>(rng.below(4)), rng, 3.0);
    const HardOutput<Real> hard = forward_hard(mag, model);
    if (!(hard.mask == denoise(mag, model.specialists[static_cast<std::size_t>(hard.selected)]))) mismatches += 1.0;
  }
  return mismatches;
}

double soft_hard_gap() {
  Rng rng(52);
  const EnsembleNet<Real> model = routing_model(rng, 4.0);
  double worst = 0.0;
  int confident = 0;
  for (int i = 0; i < 100; ++i) {
    const Matrix<Real> mag = random_mag<Real>(513, 3, rng, 3.0);
    const HardOutput<Real> hard = forward_hard(mag, model);
    if (hard.probs.maxCoeff() < Real(0.999)) continue;
    ++confident;
    const SoftOutput<Real> soft = forward_soft(mag, model);
    worst = std::max(worst, static_cast<double>((soft.mask - hard.mask).cwiseAbs().maxCoeff()));
  }
  // No confident input would make the check vacuous.
  return confident > 0 ? worst : std::numeric_limits<double>::infinity();
}

double checkpoint_round_trip() {
  Rng rng(61);
  const auto net = DenoiseNet<Real>::uniform(33, 5, rng);
  ParamStore store;
  store.add_net(net, "spec0.");
  const std::string bytes = encode_checkpoint(store);
  DenoiseNet<Real> back;
  decode_checkpoint(bytes).load_net(back, "spec0.");
  double diff = flatten(net) == flatten(back) ? 0.0 : 1.0;
  ParamStore again;
  again.add_net(back, "spec0.");
  if (encode_checkpoint(again) != bytes) diff += 1.0;
  return diff;
}

double malformed_wav() {
  const std::vector<std::uint8_t> good = encode_wav(Waveform::Zero(100));
  std::vector<std::vector<std::uint8_t>> bad;
  bad.push_back({});
  bad.emplace_back(good.begin(), good.begin() + 20);
  auto retag = good;
  retag[0] = 'X';
  bad.push_back(retag);
  auto stereo = good;
  stereo[22] = 2;  // channel count
  bad.push_back(stereo);
  auto rate = good;
  rate[24] = 0x44;  // 44100 Hz low byte, high byte below
  rate[25] = 0xAC;
  bad.push_back(rate);
  double accepted = 0.0;
  for (const auto& b : bad) {
    try {
      decode_wav(b);
      accepted += 1.0;
    } catch (const FormatError&) {
    }
  }
  return accepted;
}

double forward_determinism() {
  Rng rng(71);
  const auto net = DenoiseNet<Real>::uniform(513, 16, rng);
  const Matrix<Real> mag = random_mag<Real>(513, 6, rng, 3.0);
  const Matrix<Real> a = denoise(mag, net);
  const Matrix<Real> b = denoise(mag, net);
  return a == b ? 0.0 : 1.0;
}

double softmax_interior() {
  Rng rng(81);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd logits = gaussian(5, rng, 20.0);
    const Eigen::VectorXd p = softmax(logits);
    worst = std::max(worst, std::abs(p.sum() - 1.0));
    if ((p.array() < 0.0).any() || (p.array() > 1.0).any()) worst = 1.0;
  }
  return worst;
}

OracleCase make(std::string name, std::uint64_t seed, std::string oracle, double tol, std::function<double()> fn) {
  return {std::move(name), seed, std::move(oracle), tol, std::move(fn), [tol](double m) { return at_most(m, tol); }};
}

OracleCase make_at_least(std::string name, std::uint64_t seed, std::string oracle, double tol,
                         std::function<double()> fn) {
  return {std::move(name), seed, std::move(oracle), tol, std::move(fn), [tol](double m) { return m >= tol; }};
}

}  // namespace

int SuiteResult::failures() const {
  int n = 0;
  for (const auto& c : cases) n += c.passed ? 0 : 1;
  return n;
}

const std::vector<OracleCase>& registered_cases() {
  static const std::vector<OracleCase> cases = {
      make("grad/dense", 21, "central differences over identity, sigmoid and softmax layers", 1e-4, dense_gradient),
      make("grad/gru", 8, "central differences over parameters and inputs", 1e-4, gru_gradient),
      make_at_least("grad/gru-mutation-detected", 8,
                    "reset-gate backward term scaled by 1+1e-3 must exceed the gradient tolerance", 1e-4,
                    gru_mutation),
      make("grad/bce", 0, "central differences on the logit", 1e-4, bce_gradient),
      make("grad/cross-entropy", 4, "central differences at scales 1 and 10", 1e-4, cross_entropy_gradient),
      make("grad/siamese-pair", 6, "central differences, same and different labels", 1e-4, siamese_gradient),
      make("grad/denoiser-sisdr", 2, "central differences through GRUs, mask, iSTFT and SI-SDR", 1e-4,
           denoiser_gradient),
      make("grad/soft-gated-ensemble", 19, "central differences through gate and specialists at lambda 1 and 10",
           1e-4, ensemble_gradient),
      make("dsp/round-trip", 31, "100 Gaussian 40000-sample signals, interior max error", 1e-6, stft_round_trip),
      make("dsp/sine-peak", 0, "250 Hz sine peaks at bin 32 in every frame", 0.0, sine_peak_bin),
      make("sisdr/scale-invariance", 1, "rescaled estimate and reference, dB difference", 1e-9,
           si_sdr_scale_invariance),
      make("sisdr/orthogonal-20db", 2, "orthogonal residual at energy ratio 100:1 gives 20 dB", 1e-6,
           si_sdr_orthogonal),
      make("params/specialist-h256", 0, "closed-form count 1118721", 0.0, parameter_accounting),
      make("params/k5-total", 0, "relative distance to 5.6M", 0.02, total_vs_reported),
      make_at_least("params/k10-h64-reduction", 0, "effective share versus an H=512 generalist", 0.90,
                    effective_reduction),
      make("mixing/snr", 5, "1000 mixtures over [-5, 10] dB, measured vs requested", 1e-6, mixing_snr),
      make("mixing/additivity", 6, "mixture minus clean minus noise", 0.0, mixing_additivity),
      make("kmeans/exhaustive-n8-k2", 41, "2^8 enumeration on 20 instances, relative objective gap", 1e-9,
           kmeans_exhaustive),
      make("ensemble/hard-routing-identity", 51, "bit comparison with the selected specialist on 100 inputs", 0.0,
           hard_routing_identity),
      make("ensemble/soft-hard-gap", 52, "max |m_soft - m_hard| over inputs with p_max >= 0.999", 1e-3,
           soft_hard_gap),
      make("checkpoint/round-trip", 61, "decode(encode(net)) bit-equal and re-encoding identical", 0.0,
           checkpoint_round_trip),
      make("wav/malformed-rejected", 0, "truncated, retagged, stereo and 44.1 kHz inputs accepted", 0.0,
           malformed_wav),
      make("numerics/forward-determinism", 71, "two identical forward passes compared bitwise", 0.0,
           forward_determinism),
      make("numerics/softmax-simplex", 81, "sum-to-one error for logits of scale 20", 1e-12, softmax_interior),
  };
  return cases;
}

SuiteResult run_suite(const std::string& filter, std::ostream* text) {
  SuiteResult result;
  for (const auto& c : registered_cases()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    CaseResult r;
    r.name = c.name;
    r.tolerance = c.tolerance;
    r.detail = c.oracle;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.measured = c.measure();
      r.passed = std::isfinite(r.measured) && c.passes(r.measured);
    } catch (const std::exception& e) {
      r.passed = false;
      r.measured = std::numeric_limits<double>::quiet_NaN();
      r.detail += std::string("; threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (text) {
      *text << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(34) << r.name << " measured "
            << std::setprecision(3) << std::scientific << r.measured << " tolerance " << r.tolerance
            << std::defaultfloat << "  (" << std::fixed << std::setprecision(2) << r.seconds << "s)"
            << std::defaultfloat << "\n";
    }
    result.cases.push_back(r);
  }
  if (text) *text << result.cases.size() - result.failures() << "/" << result.cases.size() << " cases passed\n";
  return result;
}

std::string suite_json(const SuiteResult& result) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : result.cases) {
    cases.push_back({{"name", c.name},
                     {"passed", c.passed},
                     {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
                     {"tolerance", c.tolerance},
                     {"detail", c.detail}});
  }
  return nlohmann::json{{"cases", cases}, {"failures", result.failures()}}.dump(2) + "\n";
}

}  // namespace smdn

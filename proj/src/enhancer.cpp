// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "smdn/stages.hpp"

namespace smdn {

namespace {

constexpr std::uint64_t kDenoiseSamples = 0x646e3031ULL;

}  // namespace

DenoiseNet<Real> train_denoiser(DenoiseNet<Real> net, const DenoiseSetup& setup, const TrainOptions& o,
                                const StftConfig& cfg, TrainResult* result, const LogSink& log) {
  if (setup.pool.empty()) throw ConfigError("train_denoiser: empty partition");
  auto sample = [&](const DenoiseNet<Real>& n, int step, int index, DenoiseNet<Real>* grad) {
    Rng rng = Rng::derive(o.seed, kDenoiseSamples,
                          static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(o.batch) +
                              static_cast<std::uint64_t>(index));
    const Prepared p = prepare(draw_mixture(setup.pool, setup.noises, rng), cfg);
    return enhancement_loss(n, p.noisy, p.clean, grad);
  };
  auto validate = [&](const DenoiseNet<Real>& n) {
    return mean_sisdri(setup.validation, [&](const Prepared& p) { return denoise(p.mag, n); });
  };
  TrainResult r = train_loop(net, sample, validate, o, log);
  if (result) *result = r;
  return net;
}

}  // namespace smdn

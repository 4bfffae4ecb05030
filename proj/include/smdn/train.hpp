// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_TRAIN_HPP_
#define SMDN_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "smdn/adam.hpp"
#include "smdn/errors.hpp"
#include "smdn/tensor.hpp"

namespace smdn {

using LogSink = std::function<void(const std::string&)>;

struct TrainOptions {
  int steps = 1000;
  int batch = 16;
  double learning_rate = 1e-3;
  int eval_every = 50;
  int patience = 10;  // validations without improvement before stopping
  std::uint64_t seed = 1;
  int threads = 0;  // 0: SMDN_THREADS, else 1
};

struct TrainRecord {
  int step = 0;
  double train_loss = 0.0;
  std::optional<double> validation;
};

struct TrainResult {
  double best_validation = 0.0;
  int best_step = 0;
  int steps_run = 0;
  bool stopped_early = false;
  std::vector<TrainRecord> history;
};

/// Worker count from SMDN_THREADS (default 1).
int default_threads();

/// Samples are reduced in fixed chunks of this size so that the summed
/// gradient does not depend on the worker count.
inline constexpr int kGradientChunk = 8;

/// Minibatch Adam on the mean of `sample_loss(net, step, index, grad)` over
/// `batch` samples. `validate(net)` is a higher-is-better metric evaluated
/// before the first step and every `eval_every` steps; the best snapshot is
/// left in `net`. Throws DivergenceError on a non-finite loss.
template <typename Net, typename SampleLoss, typename Validate>
TrainResult train_loop(Net& net, SampleLoss&& sample_loss, Validate&& validate, const TrainOptions& o,
                       const LogSink& log = {}) {
  using S = typename Net::Scalar;
  if (o.batch < 1 || o.steps < 0 || o.eval_every < 1) throw ConfigError("train: bad batch/steps/eval_every");
  const int threads = o.threads > 0 ? o.threads : default_threads();
  const int chunks = (o.batch + kGradientChunk - 1) / kGradientChunk;

  Adam<S> adam(AdamOptions{o.learning_rate});
  TrainResult result;
  Net best = net;
  int stale = 0;
  auto check = [&](int step, double loss) {
    TrainRecord rec{step, loss, validate(static_cast<const Net&>(net))};
    if (step == 0 || *rec.validation > result.best_validation) {
      result.best_validation = *rec.validation;
      result.best_step = step;
      best = net;
      stale = 0;
    } else {
      ++stale;
    }
    if (log) {
      std::ostringstream line;
      line << "step " << step << " loss " << loss << " val " << *rec.validation;
      log(line.str());
    }
    result.history.push_back(rec);
  };
  check(0, std::nan(""));

  std::vector<Net> chunk_grads(static_cast<std::size_t>(chunks), zeros_like(net));
  std::vector<double> chunk_loss(static_cast<std::size_t>(chunks));
  for (int step = 1; step <= o.steps; ++step) {
    auto run_chunk = [&](int c) {
      Net& g = chunk_grads[static_cast<std::size_t>(c)];
      set_zero(g);
      double total = 0.0;
      for (int i = c * kGradientChunk; i < std::min(o.batch, (c + 1) * kGradientChunk); ++i) {
        total += sample_loss(static_cast<const Net&>(net), step, i, &g);
      }
      chunk_loss[static_cast<std::size_t>(c)] = total;
    };
    if (threads <= 1 || chunks == 1) {
      for (int c = 0; c < chunks; ++c) run_chunk(c);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < std::min(threads, chunks); ++w) {
        pool.emplace_back([&, w] {
          for (int c = w; c < chunks; c += threads) run_chunk(c);
        });
      }
      for (auto& t : pool) t.join();
    }
    double loss = 0.0;
    Net& grad = chunk_grads[0];
    for (int c = 0; c < chunks; ++c) {
      loss += chunk_loss[static_cast<std::size_t>(c)];
      if (c > 0) axpy(grad, chunk_grads[static_cast<std::size_t>(c)], S(1));
    }
    loss /= o.batch;
    if (!std::isfinite(loss)) {
      throw DivergenceError("train: non-finite loss at step " + std::to_string(step));
    }
    for (auto& view : tensor_views(grad)) {
      for (S& v : view.values) v /= static_cast<S>(o.batch);
    }
    adam.update(net, static_cast<const Net&>(grad));
    result.steps_run = step;
    if (step % o.eval_every == 0 || step == o.steps) {
      check(step, loss);
      if (stale >= o.patience) {
        result.stopped_early = true;
        break;
      }
    } else {
      result.history.push_back({step, loss, std::nullopt});
    }
  }
  net = best;
  return result;
}

}  // namespace smdn

#endif  // SMDN_TRAIN_HPP_

#include "nsreg/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nsreg/kernels/dispatch.hpp"
#include "nsreg/rng.hpp"

namespace nsreg {

void TrainerConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("trainer: restarts must be >= 1");
  if (epochs < 1) throw std::invalid_argument("trainer: epochs must be >= 1");
  if (step <= 0.0) throw std::invalid_argument("trainer: step must be > 0");
  if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
    throw std::invalid_argument("trainer: moment decays must lie in (0,1)");
  if (adam_eps <= 0.0) throw std::invalid_argument("trainer: adam_eps must be > 0");
}

namespace {

ReluNetwork init_network(const std::vector<int>& shape, double init_scale,
                         double y_mean, Rng& rng) {
  ReluNetwork net = make_dense_shape(shape);
  for (auto& layer : net.layers)
    for (double& v : layer.w) v = init_scale * rng.next_gaussian();
  net.layers.back().b[0] = y_mean;
  return net;
}

}  // namespace

TrainResult train_least_squares(const std::vector<int>& shape,
                                const Dataset& data, const TrainerConfig& cfg,
                                std::vector<TrainLogRow>* log) {
  cfg.validate();
  if (data.size() == 0) throw std::invalid_argument("trainer: empty dataset");
  if (shape.empty() || shape.front() != data.dim)
    throw std::invalid_argument("trainer: shape input dim must match data dim");

  const size_t n = data.size();
  const double y_mean =
      std::accumulate(data.ys.begin(), data.ys.end(), 0.0) / static_cast<double>(n);

  const auto& ops = kernels::active();

  TrainResult best;
  bool have_best = false;
  std::vector<int> discarded;

  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, "train-restart", static_cast<std::uint64_t>(r)));
    ReluNetwork net = init_network(shape, cfg.init_scale, y_mean, rng);

    const size_t params = param_count(net);
    std::vector<double> theta(params), grad(params), m(params, 0.0), v(params, 0.0);
    flatten_params(net, theta);

    double mse = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
      mse = ops.mlp_loss_grad(net, data.xs.data(), data.ys.data(), n, grad.data());
      if (!std::isfinite(mse)) {
        diverged = true;
        break;
      }
      if (log != nullptr) log->push_back({r, epoch, mse});

      const double bc1 = 1.0 - std::pow(cfg.beta1, epoch);
      const double bc2 = 1.0 - std::pow(cfg.beta2, epoch);
      for (size_t p = 0; p < params; ++p) {
        m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * grad[p];
        v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
        theta[p] -= cfg.step * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + cfg.adam_eps);
      }
      unflatten_params(net, theta);
    }

    if (!diverged) {
      // Final MSE at the last parameter values.
      mse = ops.mlp_loss_grad(net, data.xs.data(), data.ys.data(), n, grad.data());
      if (!std::isfinite(mse)) diverged = true;
    }
    if (diverged) {
      discarded.push_back(r);
      continue;
    }
    if (!have_best || mse < best.train_mse) {
      best.net = std::move(net);
      best.train_mse = mse;
      best.best_restart = r;
      have_best = true;
    }
  }

  if (!have_best)
    throw std::runtime_error("train_least_squares: every restart diverged");
  best.discarded_restarts = std::move(discarded);
  return best;
}

}  // namespace nsreg

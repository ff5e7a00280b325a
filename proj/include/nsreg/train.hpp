#pragma once

// Least-squares fitting of a dense ReLU network by full-batch Adam with
// random restarts; returns the restart with the lowest final training MSE.

#include <cstdint>
#include <vector>

#include "nsreg/piecewise.hpp"
#include "nsreg/relu_net.hpp"

namespace nsreg {

struct TrainerConfig {
  int restarts = 10;
  int epochs = 5000;
  double step = 1e-2;        // Adam step size
  double beta1 = 0.9;        // first-moment decay
  double beta2 = 0.999;      // second-moment decay
  double adam_eps = 1e-8;
  double init_scale = 0.5;   // stddev of Gaussian weight init
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainLogRow {
  int restart = 0;
  int epoch = 0;
  double mse = 0.0;
};

struct TrainResult {
  ReluNetwork net;
  double train_mse = 0.0;
  int best_restart = 0;
  std::vector<int> discarded_restarts;  // restarts that hit a non-finite loss
};

/// Weights start Gaussian(0, init_scale^2); biases start at 0 except the
/// output bias, which starts at mean(Y). Restart r uses the RNG stream
/// derived from (cfg.seed, r), so parallel and serial schedules agree. Ties
/// in final MSE go to the lowest restart index. Throws std::runtime_error if
/// every restart diverges.
TrainResult train_least_squares(const std::vector<int>& shape,
                                const Dataset& data, const TrainerConfig& cfg,
                                std::vector<TrainLogRow>* log = nullptr);

}  // namespace nsreg

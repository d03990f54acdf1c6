#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qssm/config.hpp"
#include "qssm/data.hpp"
#include "qssm/model.hpp"
#include "qssm/optim.hpp"

namespace qssm {

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double lr = 0.0;
  double gate_value = 0.0;
};

struct TrainResult {
  std::unique_ptr<ModelBundle> bundle;
  TrainState state;
  std::vector<EpochRecord> log;
  int steps = 0;
};

// Full loop: seeded shuffle, minibatches (last one may be short),
// forward/backward/Adam, eval-mode validation, plateau scheduler, early
// stopping. The best-validation parameters are restored before return.
TrainResult train(const RunConfig& cfg, const Dataset& ds);

std::string epoch_log_csv(std::span<const EpochRecord> log);

}  // namespace qssm

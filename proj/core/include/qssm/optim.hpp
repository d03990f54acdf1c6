#pragma once

#include <limits>
#include <vector>

#include "qssm/config.hpp"
#include "qssm/param_store.hpp"

namespace qssm {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;
inline constexpr double kImprovementEps = 1e-8;

// One Adam update over every trainable entry. Decoupled weight decay
// multiplies decay-flagged values by (1 - lr * weight_decay) before the
// Adam delta. Gradients are cleared afterward. step_index starts at 1.
void adam_step(ParameterStore& store, double lr, double weight_decay,
               int step_index);

struct TrainState {
  int epoch = 0;
  double lr = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int plateau_counter = 0;
  int epochs_since_improvement = 0;
  Vector best_snapshot;
};

// Plateau scheduler: an epoch improves when val_loss < best - 1e-8.
// Improvement resets both counters and lowers best; otherwise the
// counters grow and once plateau_counter exceeds the patience the lr is
// multiplied by the factor and the plateau counter resets. Returns
// whether this epoch improved.
bool scheduler_step(TrainState& state, double val_loss,
                    const TrainConfig& cfg);

bool early_stop_check(const TrainState& state, const TrainConfig& cfg);

void restore_best(const TrainState& state, ParameterStore& store);

}  // namespace qssm

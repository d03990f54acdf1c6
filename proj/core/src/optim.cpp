#include "qssm/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace qssm {

void adam_step(ParameterStore& store, double lr, double weight_decay,
               int step_index) {
  if (step_index < 1) {
    throw std::invalid_argument("adam_step: step_index starts at 1");
  }
  const double bc1 = 1.0 - std::pow(kAdamBeta1, step_index);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, step_index);
  for (std::size_t i = 0; i < store.size(); ++i) {
    ParamEntry& e = store.entry(i);
    if (!e.trainable) continue;
    auto value = e.value();
    const double decay_scale =
        e.decay && weight_decay > 0.0 ? 1.0 - lr * weight_decay : 1.0;
    for (std::size_t j = 0; j < e.size; ++j) {
      const double g = e.grad[j];
      e.m[j] = kAdamBeta1 * e.m[j] + (1.0 - kAdamBeta1) * g;
      e.v[j] = kAdamBeta2 * e.v[j] + (1.0 - kAdamBeta2) * g * g;
      const double m_hat = e.m[j] / bc1;
      const double v_hat = e.v[j] / bc2;
      value[j] = value[j] * decay_scale -
                 lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }
  }
  store.zero_grads();
  store.mark_mutated();
}

bool scheduler_step(TrainState& state, double val_loss,
                    const TrainConfig& cfg) {
  if (val_loss < state.best_val - kImprovementEps) {
    state.best_val = val_loss;
    state.best_epoch = state.epoch;
    state.plateau_counter = 0;
    state.epochs_since_improvement = 0;
    return true;
  }
  ++state.plateau_counter;
  ++state.epochs_since_improvement;
  if (state.plateau_counter > cfg.scheduler_patience) {
    state.lr *= cfg.scheduler_factor;
    state.plateau_counter = 0;
  }
  return false;
}

bool early_stop_check(const TrainState& state, const TrainConfig& cfg) {
  return state.epochs_since_improvement > cfg.early_stop_patience;
}

void restore_best(const TrainState& state, ParameterStore& store) {
  if (state.best_snapshot.empty()) {
    throw std::logic_error("restore_best: no snapshot recorded");
  }
  store.restore(state.best_snapshot);
}

}  // namespace qssm

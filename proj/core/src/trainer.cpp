#include "qssm/trainer.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qssm/eval.hpp"

namespace qssm {

namespace {

constexpr std::uint64_t kInitSalt = 1;
constexpr std::uint64_t kOrderSalt = 2;
constexpr std::uint64_t kDropoutSalt = 3;

}  // namespace

TrainResult train(const RunConfig& cfg, const Dataset& ds) {
  validate(cfg.train);
  if (ds.train.empty()) {
    throw std::invalid_argument("train: empty training split");
  }
  if (ds.val.empty()) {
    throw std::invalid_argument("train: empty validation split");
  }

  TrainResult res;
  res.bundle = make_bundle(dims_from(cfg, ds), cfg.gate, cfg.train.dropout_p,
                           cfg.train.g_min, cfg.train.g_max,
                           std::vector<std::size_t>(ds.calendar_indices.begin(),
                                                    ds.calendar_indices.end()));
  QssmModel& model = res.bundle->model;
  ParameterStore& store = res.bundle->store;

  RngStream init_rng(derive_seed(cfg.train.seed, kInitSalt));
  RngStream order_rng(derive_seed(cfg.train.seed, kOrderSalt));
  RngStream dropout_rng(derive_seed(cfg.train.seed, kDropoutSalt));
  model.init_params(init_rng, store);

  TrainState& state = res.state;
  state.lr = cfg.train.learning_rate;

  const std::size_t n = ds.train.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<WindowSample> batch;
  batch.reserve(cfg.train.batch_size);

  for (int epoch = 1; epoch <= cfg.train.max_epochs; ++epoch) {
    state.epoch = epoch;
    order_rng.shuffle(order);
    const double epoch_lr = state.lr;

    double train_loss = 0.0;
    double gate_acc = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.train.batch_size) {
      const std::size_t stop = std::min(start + cfg.train.batch_size, n);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(ds.train[order[i]]);
      }
      auto [loss, cache] =
          model.forward_loss(batch, RunMode::Train, dropout_rng, store);
      model.backward(cache, store);
      adam_step(store, state.lr, cfg.train.weight_decay, ++res.steps);
      const double weight = static_cast<double>(batch.size());
      train_loss += loss * weight;
      gate_acc += cache.mean_gate * weight;
    }
    train_loss /= static_cast<double>(n);
    const double gate_value = gate_acc / static_cast<double>(n);
    if (gate_value < cfg.train.g_min - 1e-12 ||
        gate_value > cfg.train.g_max + 1e-12) {
      throw std::logic_error("train: gate escaped its clamp band");
    }

    const double val_loss = metrics_over(model, ds.val).mse;
    res.log.push_back({epoch, train_loss, val_loss, epoch_lr, gate_value});

    if (scheduler_step(state, val_loss, cfg.train)) {
      state.best_snapshot = store.snapshot();
    }
    if (early_stop_check(state, cfg.train)) break;
  }

  restore_best(state, store);
  return res;
}

std::string epoch_log_csv(std::span<const EpochRecord> log) {
  std::ostringstream out;
  out << "epoch,train_mse,val_mse,lr,gate_value\n";
  for (const EpochRecord& r : log) {
    out << r.epoch << ',' << format_double(r.train_mse) << ','
        << format_double(r.val_mse) << ',' << format_double(r.lr) << ','
        << format_double(r.gate_value) << '\n';
  }
  return out.str();
}

}  // namespace qssm

#include "qssm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qssm {

namespace {

void fill_kaiming(Matrix& w, RngStream& rng) {
  const double std = std::sqrt(2.0 / static_cast<double>(w.cols));
  for (double& v : w.data) v = std * rng.normal();
}

Vector pooled_input_mean(std::span<const WindowSample> batch) {
  const std::size_t f_in = batch.front().x.cols;
  Vector mean(f_in, 0.0);
  std::size_t rows = 0;
  for (const WindowSample& s : batch) {
    for (std::size_t t = 0; t < s.x.rows; ++t) {
      axpy(1.0, s.x.row(t), mean);
    }
    rows += s.x.rows;
  }
  for (double& v : mean) v /= static_cast<double>(rows);
  return mean;
}

}  // namespace

QssmModel::QssmModel(const ModelDims& dims, GateKind kind, double dropout_p,
                     double g_min, double g_max,
                     std::vector<std::size_t> calendar_indices)
    : dims_(dims), kind_(kind), calendar_indices_(std::move(calendar_indices)) {
  if (dims.f_in == 0 || dims.f_out == 0 || dims.window == 0 ||
      dims.horizon == 0 || dims.proj_width == 0 || dims.latent_width == 0) {
    throw std::invalid_argument("model dims must all be positive");
  }
  gate.g_min = g_min;
  gate.g_max = g_max;
  classical_gate.w.assign(dims.f_in, 0.0);
  classical_gate.g_min = g_min;
  classical_gate.g_max = g_max;
  backbone.P_weight = Matrix(dims.proj_width, dims.f_in);
  backbone.P_bias.assign(dims.proj_width, 0.0);
  backbone.W_weight = Matrix(dims.latent_width, dims.proj_width);
  backbone.b.assign(dims.latent_width, 0.0);
  backbone.ln_gamma.assign(dims.latent_width, 1.0);
  backbone.ln_beta.assign(dims.latent_width, 0.0);
  decoder.W1 = Matrix(dims.latent_width, dims.latent_width);
  decoder.b1.assign(dims.latent_width, 0.0);
  decoder.W2 = Matrix(dims.horizon * dims.f_out, dims.latent_width);
  decoder.b2.assign(dims.horizon * dims.f_out, 0.0);
  decoder.dropout_p = dropout_p;
}

void QssmModel::register_params(ParameterStore& store) {
  const auto one = [](double& v) { return std::span<double>(&v, 1); };
  if (kind_ == GateKind::Quantum) {
    store.register_param("gate.theta1", one(gate.theta1), true, false);
    store.register_param("gate.phi1", one(gate.phi1), true, false);
    store.register_param("gate.theta2", one(gate.theta2), true, false);
    store.register_param("gate.phi2", one(gate.phi2), true, false);
    store.register_param("gate.w1", one(gate.w1), true, false);
    store.register_param("gate.w2", one(gate.w2), true, false);
    store.register_param("gate.b_g", one(gate.b_g), true, false);
  } else {
    store.register_param("gate.w", classical_gate.w, true, false);
    store.register_param("gate.b", one(classical_gate.b), true, false);
  }
  store.register_param("backbone.P_weight", backbone.P_weight.data, true, true);
  store.register_param("backbone.P_bias", backbone.P_bias, true, false);
  store.register_param("backbone.W_weight", backbone.W_weight.data, true, true);
  store.register_param("backbone.b", backbone.b, true, false);
  store.register_param("backbone.alpha", one(backbone.alpha), true, false);
  store.register_param("backbone.ln_gamma", backbone.ln_gamma, true, false);
  store.register_param("backbone.ln_beta", backbone.ln_beta, true, false);
  store.register_param("decoder.W1", decoder.W1.data, true, true);
  store.register_param("decoder.b1", decoder.b1, true, false);
  store.register_param("decoder.W2", decoder.W2.data, true, true);
  store.register_param("decoder.b2", decoder.b2, true, false);
}

void QssmModel::init_params(RngStream& rng, ParameterStore& store) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  gate.theta1 = kHalfPi;
  gate.phi1 = kHalfPi;
  gate.theta2 = kHalfPi;
  gate.phi2 = kHalfPi;
  gate.w1 = 0.01;
  gate.w2 = 0.01;
  gate.b_g = 0.0;
  std::fill(classical_gate.w.begin(), classical_gate.w.end(), 0.0);
  classical_gate.b = 0.0;
  fill_kaiming(backbone.P_weight, rng);
  std::fill(backbone.P_bias.begin(), backbone.P_bias.end(), 0.0);
  fill_kaiming(backbone.W_weight, rng);
  std::fill(backbone.b.begin(), backbone.b.end(), 0.0);
  backbone.alpha = 0.0;
  std::fill(backbone.ln_gamma.begin(), backbone.ln_gamma.end(), 1.0);
  std::fill(backbone.ln_beta.begin(), backbone.ln_beta.end(), 0.0);
  fill_kaiming(decoder.W1, rng);
  std::fill(decoder.b1.begin(), decoder.b1.end(), 0.0);
  fill_kaiming(decoder.W2, rng);
  std::fill(decoder.b2.begin(), decoder.b2.end(), 0.0);
  store.mark_mutated();
}

std::pair<double, BatchCache> QssmModel::forward_loss(
    std::span<const WindowSample> batch, RunMode mode, RngStream& rng,
    const ParameterStore& store) const {
  if (batch.empty()) {
    throw std::invalid_argument("forward_loss: empty batch");
  }
  for (const WindowSample& s : batch) {
    if (s.x.rows != dims_.window || s.x.cols != dims_.f_in ||
        s.y.rows != dims_.horizon || s.y.cols != dims_.f_out ||
        s.x_last.size() != dims_.f_out) {
      throw std::invalid_argument("forward_loss: sample shape mismatch");
    }
  }

  BatchCache cache;
  cache.revision = store.revision();
  cache.mode = mode;
  cache.kind = kind_;

  double shared_g = 0.5;
  if (kind_ == GateKind::Quantum) {
    cache.gate_out = gate_forward(gate);
    shared_g = cache.gate_out.g;
  } else if (kind_ == GateKind::Classical) {
    cache.pooled_mean = pooled_input_mean(batch);
    cache.shared_gate = classical_gate_forward(classical_gate, cache.pooled_mean);
    shared_g = cache.shared_gate.g;
  }

  const double per_entry =
      1.0 / static_cast<double>(dims_.horizon * dims_.f_out);
  double loss = 0.0;
  double gate_sum = 0.0;
  std::size_t gate_count = 0;
  cache.samples.reserve(batch.size());
  for (const WindowSample& s : batch) {
    SampleCache sc;
    if (kind_ == GateKind::ClassicalPerStep) {
      Vector gates(s.x.rows);
      sc.step_gates.reserve(s.x.rows);
      for (std::size_t t = 0; t < s.x.rows; ++t) {
        sc.step_gates.push_back(classical_gate_forward(classical_gate, s.x.row(t)));
        gates[t] = sc.step_gates.back().g;
        gate_sum += gates[t];
        ++gate_count;
      }
      auto [h, enc] = encode_stepwise(s.x, gates, backbone, calendar_indices_);
      sc.encode = std::move(enc);
      auto [forecast, dec] = decode(h, s.x_last, decoder, mode, rng);
      sc.decode = std::move(dec);
      sc.diff = std::move(forecast.values);
    } else {
      auto [h, enc] = encode(s.x, shared_g, backbone, calendar_indices_);
      sc.encode = std::move(enc);
      auto [forecast, dec] = decode(h, s.x_last, decoder, mode, rng);
      sc.decode = std::move(dec);
      sc.diff = std::move(forecast.values);
      gate_sum += shared_g;
      ++gate_count;
    }
    double sample_se = 0.0;
    for (std::size_t i = 0; i < sc.diff.size(); ++i) {
      sc.diff.data[i] -= s.y.data[i];
      sample_se += sc.diff.data[i] * sc.diff.data[i];
    }
    loss += sample_se * per_entry;
    cache.samples.push_back(std::move(sc));
  }
  loss /= static_cast<double>(batch.size());
  cache.loss = loss;
  cache.mean_gate = gate_sum / static_cast<double>(gate_count);
  return {loss, std::move(cache)};
}

void QssmModel::backward(const BatchCache& cache, ParameterStore& store) const {
  if (cache.revision != store.revision()) {
    throw std::logic_error("backward: cache is stale (parameters changed since forward)");
  }
  if (cache.samples.empty()) {
    throw std::logic_error("backward: empty cache");
  }
  const double scale =
      2.0 / static_cast<double>(dims_.horizon * dims_.f_out *
                                cache.samples.size());

  auto acc = [&store](const char* name, std::span<const double> g) {
    axpy(1.0, g, store.grad(name));
  };
  auto acc1 = [&store](const char* name, double g) {
    store.grad(name)[0] += g;
  };

  double gate_total = 0.0;
  Matrix upstream;
  for (const SampleCache& sc : cache.samples) {
    upstream = sc.diff;
    for (double& v : upstream.data) v *= scale;

    auto [dec_grads, dh] = decode_backward(sc.decode, decoder, upstream);
    acc("decoder.W1", dec_grads.W1.data);
    acc("decoder.b1", dec_grads.b1);
    acc("decoder.W2", dec_grads.W2.data);
    acc("decoder.b2", dec_grads.b2);

    EncodeBackwardResult enc_grads = encode_backward(sc.encode, backbone, dh);
    acc("backbone.P_weight", enc_grads.params.P_weight.data);
    acc("backbone.P_bias", enc_grads.params.P_bias);
    acc("backbone.W_weight", enc_grads.params.W_weight.data);
    acc("backbone.b", enc_grads.params.b);
    acc1("backbone.alpha", enc_grads.params.alpha);
    acc("backbone.ln_gamma", enc_grads.params.ln_gamma);
    acc("backbone.ln_beta", enc_grads.params.ln_beta);

    if (kind_ == GateKind::ClassicalPerStep) {
      for (std::size_t t = 0; t < sc.step_gates.size(); ++t) {
        auto [dw, db] = classical_gate_backward(sc.step_gates[t], classical_gate,
                                                sc.encode.x.row(t),
                                                enc_grads.gate_per_step[t]);
        acc("gate.w", dw);
        acc1("gate.b", db);
      }
    } else {
      gate_total += enc_grads.gate;
    }
  }

  if (kind_ == GateKind::Quantum) {
    const GateGrads gg = gate_backward(cache.gate_out, gate, gate_total);
    acc1("gate.theta1", gg.theta1);
    acc1("gate.phi1", gg.phi1);
    acc1("gate.theta2", gg.theta2);
    acc1("gate.phi2", gg.phi2);
    acc1("gate.w1", gg.w1);
    acc1("gate.w2", gg.w2);
    acc1("gate.b_g", gg.b_g);
  } else if (kind_ == GateKind::Classical) {
    auto [dw, db] = classical_gate_backward(cache.shared_gate, classical_gate,
                                            cache.pooled_mean, gate_total);
    acc("gate.w", dw);
    acc1("gate.b", db);
  }
}

Forecast QssmModel::predict(const WindowSample& sample) const {
  if (sample.x.rows != dims_.window || sample.x.cols != dims_.f_in ||
      sample.x_last.size() != dims_.f_out) {
    throw std::invalid_argument("predict: sample shape mismatch");
  }
  double shared_g = 0.5;
  Vector gates;
  if (kind_ == GateKind::Quantum) {
    shared_g = gate_forward(gate).g;
  } else if (kind_ == GateKind::Classical) {
    Vector mean(dims_.f_in, 0.0);
    for (std::size_t t = 0; t < sample.x.rows; ++t) axpy(1.0, sample.x.row(t), mean);
    for (double& v : mean) v /= static_cast<double>(sample.x.rows);
    shared_g = classical_gate_forward(classical_gate, mean).g;
  } else {
    gates.resize(sample.x.rows);
    for (std::size_t t = 0; t < sample.x.rows; ++t) {
      gates[t] = classical_gate_forward(classical_gate, sample.x.row(t)).g;
    }
  }
  HiddenState h;
  if (kind_ == GateKind::ClassicalPerStep) {
    h = encode_stepwise(sample.x, gates, backbone, calendar_indices_).first;
  } else {
    h = encode(sample.x, shared_g, backbone, calendar_indices_).first;
  }
  RngStream unused(0);
  return decode(h, sample.x_last, decoder, RunMode::Eval, unused).first;
}

double QssmModel::current_gate(std::span<const WindowSample> batch) const {
  if (kind_ == GateKind::Quantum) return gate_forward(gate).g;
  if (batch.empty()) {
    throw std::invalid_argument("current_gate: classical gate needs input data");
  }
  if (kind_ == GateKind::Classical) {
    return classical_gate_forward(classical_gate, pooled_input_mean(batch)).g;
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (const WindowSample& s : batch) {
    for (std::size_t t = 0; t < s.x.rows; ++t) {
      sum += classical_gate_forward(classical_gate, s.x.row(t)).g;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

std::unique_ptr<ModelBundle> make_bundle(const ModelDims& dims, GateKind kind,
                                         double dropout_p, double g_min,
                                         double g_max,
                                         std::vector<std::size_t> calendar_indices) {
  return std::make_unique<ModelBundle>(dims, kind, dropout_p, g_min, g_max,
                                       std::move(calendar_indices));
}

ModelDims dims_from(const RunConfig& cfg, const Dataset& ds) {
  ModelDims dims;
  dims.f_in = ds.f_in;
  dims.f_out = ds.f_out;
  dims.window = cfg.train.window;
  dims.horizon = cfg.train.horizon;
  dims.proj_width = cfg.train.proj_width;
  dims.latent_width = cfg.train.latent_width;
  return dims;
}

}  // namespace qssm

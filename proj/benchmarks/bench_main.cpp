// Microbenchmarks for the hot paths: gate circuit, recurrence encode,
// decoder, and one full train step. Run with --benchmark_filter=... to
// select a subset.
#include <benchmark/benchmark.h>

#include <vector>

#include "qssm/backbone.hpp"
#include "qssm/decoder.hpp"
#include "qssm/model.hpp"
#include "qssm/optim.hpp"
#include "qssm/qgate.hpp"
#include "qssm/rng.hpp"

namespace {

using namespace qssm;

constexpr std::size_t kFIn = 8;
constexpr std::size_t kProj = 32;
constexpr std::size_t kLatent = 32;
constexpr std::size_t kFOut = 8;

BackboneParams random_backbone(RngStream& rng) {
  BackboneParams p;
  p.P_weight = Matrix(kProj, kFIn);
  p.P_bias.resize(kProj);
  p.W_weight = Matrix(kLatent, kProj);
  p.b.resize(kLatent);
  p.ln_gamma.assign(kLatent, 1.0);
  p.ln_beta.resize(kLatent);
  p.alpha = 0.1;
  for (double& v : p.P_weight.data) v = 0.1 * rng.normal();
  for (double& v : p.P_bias) v = 0.1 * rng.normal();
  for (double& v : p.W_weight.data) v = 0.1 * rng.normal();
  for (double& v : p.b) v = 0.1 * rng.normal();
  return p;
}

Matrix random_window(RngStream& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.normal();
  return m;
}

void BM_CircuitExpectation(benchmark::State& state) {
  double theta = 0.7, phi = -0.3, acc = 0.0;
  for (auto _ : state) {
    acc += expect_z(prepare_state(theta, phi));
    theta += 1e-6;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_CircuitExpectation);

void BM_GateForward(benchmark::State& state) {
  GateParams p;
  p.theta1 = 0.9;
  p.phi1 = 0.2;
  p.theta2 = -1.1;
  p.phi2 = 0.4;
  p.w1 = 0.8;
  p.w2 = -0.5;
  p.b_g = 0.1;
  double acc = 0.0;
  for (auto _ : state) {
    acc += gate_forward(p).g;
    p.theta1 += 1e-6;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_GateForward);

void BM_GateBackward(benchmark::State& state) {
  GateParams p;
  p.theta1 = 0.9;
  p.phi1 = 0.2;
  p.theta2 = -1.1;
  p.phi2 = 0.4;
  p.w1 = 0.8;
  p.w2 = -0.5;
  p.b_g = 0.1;
  const GateOutput out = gate_forward(p);
  double acc = 0.0;
  for (auto _ : state) {
    acc += gate_backward(out, p, 1.0).theta1;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_GateBackward);

void BM_ParamShift(benchmark::State& state) {
  GateParams p;
  p.theta1 = 0.9;
  p.phi1 = 0.2;
  p.theta2 = -1.1;
  p.phi2 = 0.4;
  double acc = 0.0;
  for (auto _ : state) {
    acc += param_shift_grad(p, GateAngle::Theta1);
    acc += param_shift_grad(p, GateAngle::Phi1);
    acc += param_shift_grad(p, GateAngle::Theta2);
    acc += param_shift_grad(p, GateAngle::Phi2);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ParamShift);

void BM_Encode(benchmark::State& state) {
  RngStream rng(1);
  const BackboneParams params = random_backbone(rng);
  const Matrix window = random_window(rng, state.range(0), kFIn);
  const std::vector<std::size_t> cal = {kFIn - 1};
  double acc = 0.0;
  for (auto _ : state) {
    auto [h, cache] = encode(window, 0.5, params, cal);
    acc += h[0];
  }
  benchmark::DoNotOptimize(acc);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Encode)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_EncodeBackward(benchmark::State& state) {
  RngStream rng(1);
  const BackboneParams params = random_backbone(rng);
  const Matrix window = random_window(rng, state.range(0), kFIn);
  const std::vector<std::size_t> cal = {kFIn - 1};
  const auto [h, cache] = encode(window, 0.5, params, cal);
  Vector upstream(kLatent, 1.0);
  double acc = 0.0;
  for (auto _ : state) {
    acc += encode_backward(cache, params, upstream).gate;
  }
  benchmark::DoNotOptimize(acc);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EncodeBackward)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_Decode(benchmark::State& state) {
  RngStream rng(2);
  const std::size_t horizon = state.range(0);
  DecoderParams params;
  params.W1 = Matrix(kLatent, kLatent);
  params.b1.resize(kLatent);
  params.W2 = Matrix(horizon * kFOut, kLatent);
  params.b2.resize(horizon * kFOut);
  params.dropout_p = 0.0;
  for (double& v : params.W1.data) v = 0.1 * rng.normal();
  for (double& v : params.W2.data) v = 0.1 * rng.normal();
  Vector h(kLatent), x_last(kFOut);
  for (double& v : h) v = rng.normal();
  for (double& v : x_last) v = rng.normal();
  double acc = 0.0;
  for (auto _ : state) {
    auto [forecast, cache] = decode(h, x_last, params, RunMode::Eval, rng);
    acc += forecast.values(0, 0);
  }
  benchmark::DoNotOptimize(acc);
  state.SetComplexityN(horizon);
}
BENCHMARK(BM_Decode)->RangeMultiplier(2)->Range(24, 192)->Complexity();

void BM_DecodeBackward(benchmark::State& state) {
  RngStream rng(2);
  const std::size_t horizon = state.range(0);
  DecoderParams params;
  params.W1 = Matrix(kLatent, kLatent);
  params.b1.resize(kLatent);
  params.W2 = Matrix(horizon * kFOut, kLatent);
  params.b2.resize(horizon * kFOut);
  params.dropout_p = 0.0;
  for (double& v : params.W1.data) v = 0.1 * rng.normal();
  for (double& v : params.W2.data) v = 0.1 * rng.normal();
  Vector h(kLatent), x_last(kFOut);
  for (double& v : h) v = rng.normal();
  for (double& v : x_last) v = rng.normal();
  const auto [forecast, cache] = decode(h, x_last, params, RunMode::Eval, rng);
  Matrix upstream(horizon, kFOut);
  for (double& v : upstream.data) v = 1.0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += decode_backward(cache, params, upstream).second[0];
  }
  benchmark::DoNotOptimize(acc);
  state.SetComplexityN(horizon);
}
BENCHMARK(BM_DecodeBackward)->RangeMultiplier(2)->Range(24, 192)->Complexity();

void BM_TrainStep(benchmark::State& state) {
  const ModelDims dims{kFIn, kFOut, 64, 24, kProj, kLatent};
  auto bundle = make_bundle(dims, GateKind::Quantum, 0.0, 0.05, 0.95, {});
  RngStream rng(3);
  bundle->model.init_params(rng, bundle->store);

  std::vector<WindowSample> batch(32);
  for (WindowSample& s : batch) {
    s.x = random_window(rng, dims.window, kFIn);
    s.y = random_window(rng, dims.horizon, kFOut);
    const auto last = s.x.row(dims.window - 1);
    s.x_last.assign(last.begin(), last.begin() + kFOut);
  }

  int step_index = 0;
  for (auto _ : state) {
    auto [loss, cache] =
        bundle->model.forward_loss(batch, RunMode::Train, rng, bundle->store);
    bundle->model.backward(cache, bundle->store);
    adam_step(bundle->store, 1e-3, 0.0, ++step_index);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

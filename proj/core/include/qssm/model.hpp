#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qssm/backbone.hpp"
#include "qssm/config.hpp"
#include "qssm/data.hpp"
#include "qssm/decoder.hpp"
#include "qssm/param_store.hpp"
#include "qssm/qgate.hpp"
#include "qssm/rng.hpp"

namespace qssm {

struct ModelDims {
  std::size_t f_in = 0;
  std::size_t f_out = 0;
  std::size_t window = 0;
  std::size_t horizon = 0;
  std::size_t proj_width = 0;
  std::size_t latent_width = 0;
};

struct SampleCache {
  EncodeCache encode;
  DecodeCache decode;
  Matrix diff;  // prediction - truth, horizon x F_out
  std::vector<ClassicalGateOutput> step_gates;  // per-step gate only
};

struct BatchCache {
  std::uint64_t revision = 0;
  RunMode mode = RunMode::Eval;
  GateKind kind = GateKind::Quantum;
  GateOutput gate_out;             // quantum gate, shared by the batch
  ClassicalGateOutput shared_gate; // classical gate on the pooled mean
  Vector pooled_mean;              // batch+window mean input row (classical)
  std::vector<SampleCache> samples;
  double loss = 0.0;
  double mean_gate = 0.5;
};

class QssmModel {
 public:
  QssmModel(const ModelDims& dims, GateKind kind, double dropout_p,
            double g_min, double g_max,
            std::vector<std::size_t> calendar_indices);

  void register_params(ParameterStore& store);
  void init_params(RngStream& rng, ParameterStore& store);

  std::pair<double, BatchCache> forward_loss(std::span<const WindowSample> batch,
                                             RunMode mode, RngStream& rng,
                                             const ParameterStore& store) const;
  void backward(const BatchCache& cache, ParameterStore& store) const;

  // Eval-mode forward over one sample.
  Forecast predict(const WindowSample& sample) const;

  // Gate value the model would use on this batch (logging/inspection).
  double current_gate(std::span<const WindowSample> batch) const;

  const ModelDims& dims() const { return dims_; }
  GateKind kind() const { return kind_; }
  std::span<const std::size_t> calendar_indices() const {
    return calendar_indices_;
  }

  GateParams gate;
  ClassicalGateParams classical_gate;
  BackboneParams backbone;
  DecoderParams decoder;

 private:
  ModelDims dims_;
  GateKind kind_;
  std::vector<std::size_t> calendar_indices_;
};

// Model plus its parameter store; heap-bound so the store's value views
// never move out from under it.
struct ModelBundle {
  QssmModel model;
  ParameterStore store;

  ModelBundle(const ModelDims& dims, GateKind kind, double dropout_p,
              double g_min, double g_max,
              std::vector<std::size_t> calendar_indices)
      : model(dims, kind, dropout_p, g_min, g_max, std::move(calendar_indices)) {
    model.register_params(store);
  }
};

std::unique_ptr<ModelBundle> make_bundle(const ModelDims& dims, GateKind kind,
                                         double dropout_p, double g_min,
                                         double g_max,
                                         std::vector<std::size_t> calendar_indices);

ModelDims dims_from(const RunConfig& cfg, const Dataset& ds);

}  // namespace qssm

#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "qssm/rng.hpp"
#include "qssm/tensor.hpp"

namespace qssm {

enum class RunMode { Train, Eval };

struct DecoderParams {
  Matrix W1;   // d x d
  Vector b1;   // d
  Matrix W2;   // (H*F_out) x d
  Vector b2;   // H*F_out
  double dropout_p = 0.1;

  std::size_t latent_width() const { return W1.rows; }
  std::size_t flat_size() const { return W2.rows; }
};

struct Forecast {
  Matrix values;  // H x F_out, normalized units
};

struct DecodeCache {
  std::size_t latent_width = 0;
  std::size_t horizon = 0;
  std::size_t f_out = 0;
  RunMode mode = RunMode::Eval;
  Vector h;        // input hidden state
  Vector z_pre;    // W1 h + b1
  Vector z_drop;   // after ReLU and dropout scaling
  Vector mask;     // per-unit keep scale (1/(1-p) or 0); all ones in eval
};

struct DecoderGrads {
  Matrix W1;
  Vector b1;
  Matrix W2;
  Vector b2;
};

std::pair<Forecast, DecodeCache> decode(std::span<const double> h,
                                        std::span<const double> x_t_raw,
                                        const DecoderParams& params,
                                        RunMode mode, RngStream& rng);

// Returns (parameter grads, grad w.r.t. h).
std::pair<DecoderGrads, Vector> decode_backward(const DecodeCache& cache,
                                                const DecoderParams& params,
                                                const Matrix& upstream);

}  // namespace qssm

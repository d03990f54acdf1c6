#pragma once

#include <span>
#include <utility>

#include "qssm/tensor.hpp"

namespace qssm {

inline constexpr double kLayerNormEps = 1e-5;

/// Backbone trainables: input projection P (with bias), latent projection W,
/// post-projection bias b, calendar coefficient alpha, and the layer-norm
/// affine pair.
struct BackboneParams {
  Matrix P_weight;  // k x F_in
  Vector P_bias;    // k
  Matrix W_weight;  // d x k
  Vector b;         // d
  double alpha = 0.0;
  Vector ln_gamma;  // d
  Vector ln_beta;   // d

  std::size_t f_in() const { return P_weight.cols; }
  std::size_t proj_width() const { return P_weight.rows; }
  std::size_t latent_width() const { return W_weight.rows; }
};

using HiddenState = Vector;

/// Everything the reverse pass over one window needs: per-step projections,
/// layer-norm statistics, the hidden-state trajectory, and the gate values.
struct EncodeCache {
  std::size_t window_len = 0;
  std::size_t f_in = 0;
  std::size_t proj_width = 0;
  std::size_t latent_width = 0;
  double c = 0.0;               // calendar scalar for this window
  Vector gates;                 // per-step gate values (all equal when uniform)
  bool stepwise = false;
  std::vector<std::size_t> calendar_indices;
  Matrix x;        // W x F_in, copy of the window
  Matrix v;        // W x k, P x_t + P_bias
  Matrix u_pre;    // W x d, W v_t + b + alpha c
  Matrix xhat;     // W x d, normalized pre-affine LN output
  Vector ln_mean;  // per step
  Vector ln_var;   // per step (population)
  Matrix u;        // W x d, post-LN
  Matrix h;        // (W+1) x d trajectory, h[0] = 0
};

struct BackboneGrads {
  Matrix P_weight;
  Vector P_bias;
  Matrix W_weight;
  Vector b;
  double alpha = 0.0;
  Vector ln_gamma;
  Vector ln_beta;
};

struct EncodeBackwardResult {
  BackboneGrads params;
  double gate = 0.0;      // sum of per-step gate contributions
  Vector gate_per_step;   // one entry per window step
  Matrix inputs;          // W x F_in, includes the calendar-scalar path
};

/// Mean over every (step x calendar-column) entry of the window; 0 for an
/// empty index list. Throws std::invalid_argument on an out-of-range index.
double calendar_scalar(const Matrix& window,
                       std::span<const std::size_t> calendar_indices);

/// gamma * (v - mean) / sqrt(var + eps) + beta with population variance.
Vector layer_norm(std::span<const double> v, std::span<const double> gamma,
                  std::span<const double> beta);

/// One gated update: (1-g) h_prev + g LN(W (P x_t + P_bias) + b + alpha c).
HiddenState step(const HiddenState& h_prev, std::span<const double> x_t,
                 double c, double g, const BackboneParams& params);

/// Runs step over every window row from h_0 = 0 with one shared gate value.
std::pair<HiddenState, EncodeCache> encode(
    const Matrix& window, double g, const BackboneParams& params,
    std::span<const std::size_t> calendar_indices);

/// Per-step gate variant (classical per-step ablation); gates.size() must
/// equal the window length.
std::pair<HiddenState, EncodeCache> encode_stepwise(
    const Matrix& window, std::span<const double> gates,
    const BackboneParams& params,
    std::span<const std::size_t> calendar_indices);

/// Reverse accumulation through all steps. The hidden-state Jacobian applies
/// as the scalar (1-g) per step; the gate gradient aggregates every step's
/// contribution. Throws std::logic_error on a cache/params shape mismatch.
EncodeBackwardResult encode_backward(const EncodeCache& cache,
                                     const BackboneParams& params,
                                     std::span<const double> upstream);

}  // namespace qssm

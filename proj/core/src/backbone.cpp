#include "qssm/backbone.hpp"

#include <cmath>
#include <stdexcept>

namespace qssm {

namespace {

void validate_params(const BackboneParams& p) {
  const std::size_t k = p.proj_width();
  const std::size_t d = p.latent_width();
  if (p.P_bias.size() != k || p.W_weight.cols != k || p.b.size() != d ||
      p.ln_gamma.size() != d || p.ln_beta.size() != d) {
    throw std::invalid_argument("backbone params: inconsistent shapes");
  }
}

// Forward LN for one step, recording mean/var/xhat into the cache row.
void ln_forward_cached(std::span<const double> v, const BackboneParams& p,
                       double& mean, double& var, std::span<double> xhat,
                       std::span<double> out) {
  const std::size_t d = v.size();
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(d);
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(d);  // population variance
  const double inv_std = 1.0 / std::sqrt(s2 + kLayerNormEps);
  for (std::size_t j = 0; j < d; ++j) {
    xhat[j] = (v[j] - m) * inv_std;
    out[j] = p.ln_gamma[j] * xhat[j] + p.ln_beta[j];
  }
  mean = m;
  var = s2;
}

std::pair<HiddenState, EncodeCache> encode_impl(
    const Matrix& window, std::span<const double> gates,
    const BackboneParams& params,
    std::span<const std::size_t> calendar_indices, bool stepwise) {
  validate_params(params);
  const std::size_t w = window.rows;
  if (w == 0) throw std::invalid_argument("encode: empty window");
  if (window.cols != params.f_in()) {
    throw std::invalid_argument("encode: window width != F_in");
  }
  if (gates.size() != w) {
    throw std::invalid_argument("encode: gate count != window length");
  }
  const std::size_t k = params.proj_width();
  const std::size_t d = params.latent_width();

  EncodeCache cache;
  cache.window_len = w;
  cache.f_in = window.cols;
  cache.proj_width = k;
  cache.latent_width = d;
  cache.stepwise = stepwise;
  cache.gates.assign(gates.begin(), gates.end());
  cache.calendar_indices.assign(calendar_indices.begin(),
                                calendar_indices.end());
  cache.c = calendar_scalar(window, calendar_indices);
  cache.x = window;
  cache.v = Matrix(w, k);
  cache.u_pre = Matrix(w, d);
  cache.xhat = Matrix(w, d);
  cache.ln_mean.assign(w, 0.0);
  cache.ln_var.assign(w, 0.0);
  cache.u = Matrix(w, d);
  cache.h = Matrix(w + 1, d);  // h[0] = 0

  for (std::size_t t = 0; t < w; ++t) {
    matvec(params.P_weight, window.row(t), cache.v.row(t));
    axpy(1.0, params.P_bias, cache.v.row(t));
    matvec(params.W_weight, cache.v.row(t), cache.u_pre.row(t));
    auto u_pre = cache.u_pre.row(t);
    const double cal = params.alpha * cache.c;
    for (std::size_t j = 0; j < d; ++j) u_pre[j] += params.b[j] + cal;
    ln_forward_cached(u_pre, params, cache.ln_mean[t], cache.ln_var[t],
                      cache.xhat.row(t), cache.u.row(t));
    const double g = gates[t];
    auto h_prev = cache.h.row(t);
    auto h_next = cache.h.row(t + 1);
    auto u = cache.u.row(t);
    for (std::size_t j = 0; j < d; ++j) {
      h_next[j] = (1.0 - g) * h_prev[j] + g * u[j];
    }
  }
  HiddenState h_final(cache.h.row(w).begin(), cache.h.row(w).end());
  return {std::move(h_final), std::move(cache)};
}

}  // namespace

double calendar_scalar(const Matrix& window,
                       std::span<const std::size_t> calendar_indices) {
  if (calendar_indices.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t < window.rows; ++t) {
    for (std::size_t idx : calendar_indices) {
      if (idx >= window.cols) {
        throw std::invalid_argument("calendar_scalar: column index out of range");
      }
      acc += window(t, idx);
    }
  }
  return acc / static_cast<double>(window.rows * calendar_indices.size());
}

Vector layer_norm(std::span<const double> v, std::span<const double> gamma,
                  std::span<const double> beta) {
  const std::size_t d = v.size();
  if (gamma.size() != d || beta.size() != d) {
    throw std::invalid_argument("layer_norm: affine size mismatch");
  }
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(d);
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(d);
  const double inv_std = 1.0 / std::sqrt(s2 + kLayerNormEps);
  Vector out(d);
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = gamma[j] * (v[j] - m) * inv_std + beta[j];
  }
  return out;
}

HiddenState step(const HiddenState& h_prev, std::span<const double> x_t,
                 double c, double g, const BackboneParams& params) {
  validate_params(params);
  if (x_t.size() != params.f_in() || h_prev.size() != params.latent_width()) {
    throw std::invalid_argument("step: shape mismatch");
  }
  const std::size_t d = params.latent_width();
  Vector v(params.proj_width());
  matvec(params.P_weight, x_t, v);
  axpy(1.0, params.P_bias, v);
  Vector u_pre(d);
  matvec(params.W_weight, v, u_pre);
  const double cal = params.alpha * c;
  for (std::size_t j = 0; j < d; ++j) u_pre[j] += params.b[j] + cal;
  Vector u = layer_norm(u_pre, params.ln_gamma, params.ln_beta);
  HiddenState h(d);
  for (std::size_t j = 0; j < d; ++j) {
    h[j] = (1.0 - g) * h_prev[j] + g * u[j];
  }
  return h;
}

std::pair<HiddenState, EncodeCache> encode(
    const Matrix& window, double g, const BackboneParams& params,
    std::span<const std::size_t> calendar_indices) {
  Vector gates(window.rows, g);
  return encode_impl(window, gates, params, calendar_indices, false);
}

std::pair<HiddenState, EncodeCache> encode_stepwise(
    const Matrix& window, std::span<const double> gates,
    const BackboneParams& params,
    std::span<const std::size_t> calendar_indices) {
  return encode_impl(window, gates, params, calendar_indices, true);
}

EncodeBackwardResult encode_backward(const EncodeCache& cache,
                                     const BackboneParams& params,
                                     std::span<const double> upstream) {
  validate_params(params);
  const std::size_t w = cache.window_len;
  const std::size_t d = cache.latent_width;
  const std::size_t k = cache.proj_width;
  if (w == 0 || cache.f_in != params.f_in() || k != params.proj_width() ||
      d != params.latent_width() || cache.gates.size() != w ||
      cache.h.rows != w + 1) {
    throw std::logic_error("encode_backward: cache/params mismatch");
  }
  if (upstream.size() != d) {
    throw std::logic_error("encode_backward: upstream size != latent width");
  }

  EncodeBackwardResult res;
  res.params.P_weight = Matrix(k, cache.f_in);
  res.params.P_bias.assign(k, 0.0);
  res.params.W_weight = Matrix(d, k);
  res.params.b.assign(d, 0.0);
  res.params.ln_gamma.assign(d, 0.0);
  res.params.ln_beta.assign(d, 0.0);
  res.gate_per_step.assign(w, 0.0);
  res.inputs = Matrix(w, cache.f_in);

  Vector delta(upstream.begin(), upstream.end());
  Vector du(d), dxhat(d), du_pre(d), dv(k);
  double dc_total = 0.0;

  for (std::size_t t = w; t-- > 0;) {
    const double g = cache.gates[t];
    auto u = cache.u.row(t);
    auto h_prev = cache.h.row(t);

    // gate contribution: dL/dg_t = delta . (u_t - h_{t-1})
    double gg = 0.0;
    for (std::size_t j = 0; j < d; ++j) gg += delta[j] * (u[j] - h_prev[j]);
    res.gate_per_step[t] = gg;

    for (std::size_t j = 0; j < d; ++j) du[j] = g * delta[j];

    // LN backward: u = gamma * xhat + beta
    auto xhat = cache.xhat.row(t);
    for (std::size_t j = 0; j < d; ++j) {
      res.params.ln_gamma[j] += du[j] * xhat[j];
      res.params.ln_beta[j] += du[j];
      dxhat[j] = du[j] * params.ln_gamma[j];
    }
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      mean_dxhat += dxhat[j];
      mean_dxhat_xhat += dxhat[j] * xhat[j];
    }
    mean_dxhat /= static_cast<double>(d);
    mean_dxhat_xhat /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(cache.ln_var[t] + kLayerNormEps);
    for (std::size_t j = 0; j < d; ++j) {
      du_pre[j] =
          inv_std * (dxhat[j] - mean_dxhat - xhat[j] * mean_dxhat_xhat);
    }

    // u_pre = W v + b + alpha c
    double sum_dupre = 0.0;
    for (std::size_t j = 0; j < d; ++j) sum_dupre += du_pre[j];
    outer_acc(res.params.W_weight, du_pre, cache.v.row(t));
    axpy(1.0, du_pre, res.params.b);
    res.params.alpha += cache.c * sum_dupre;
    dc_total += params.alpha * sum_dupre;

    // v = P x + P_bias
    matvec_t(params.W_weight, du_pre, dv);
    outer_acc(res.params.P_weight, dv, cache.x.row(t));
    axpy(1.0, dv, res.params.P_bias);
    matvec_t(params.P_weight, dv, res.inputs.row(t));

    for (std::size_t j = 0; j < d; ++j) delta[j] *= (1.0 - g);
  }

  // Calendar path: c is the mean over every (step x calendar-column) entry.
  if (!cache.calendar_indices.empty()) {
    const double scale =
        dc_total /
        static_cast<double>(w * cache.calendar_indices.size());
    for (std::size_t t = 0; t < w; ++t) {
      for (std::size_t idx : cache.calendar_indices) {
        res.inputs(t, idx) += scale;
      }
    }
  }

  double total = 0.0;
  for (double gg : res.gate_per_step) total += gg;
  res.gate = total;
  return res;
}

}  // namespace qssm

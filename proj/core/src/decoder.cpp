#include "qssm/decoder.hpp"

#include <stdexcept>

namespace qssm {

namespace {

void validate_params(const DecoderParams& p, std::size_t f_out) {
  const std::size_t d = p.latent_width();
  if (p.W1.cols != d || p.b1.size() != d || p.W2.cols != d ||
      p.b2.size() != p.W2.rows) {
    throw std::invalid_argument("decoder params: inconsistent shapes");
  }
  if (p.dropout_p < 0.0 || p.dropout_p >= 1.0) {
    throw std::invalid_argument("decoder params: dropout_p outside [0, 1)");
  }
  if (f_out == 0 || p.flat_size() % f_out != 0) {
    throw std::invalid_argument("decoder params: flat size not divisible by F_out");
  }
}

}  // namespace

std::pair<Forecast, DecodeCache> decode(std::span<const double> h,
                                        std::span<const double> x_t_raw,
                                        const DecoderParams& params,
                                        RunMode mode, RngStream& rng) {
  validate_params(params, x_t_raw.size());
  const std::size_t d = params.latent_width();
  if (h.size() != d) throw std::invalid_argument("decode: hidden size != d");
  const std::size_t f_out = x_t_raw.size();
  const std::size_t horizon = params.flat_size() / f_out;

  DecodeCache cache;
  cache.latent_width = d;
  cache.horizon = horizon;
  cache.f_out = f_out;
  cache.mode = mode;
  cache.h.assign(h.begin(), h.end());
  cache.z_pre.resize(d);
  matvec(params.W1, h, cache.z_pre);
  axpy(1.0, params.b1, cache.z_pre);

  cache.mask.assign(d, 1.0);
  if (mode == RunMode::Train && params.dropout_p > 0.0) {
    const double keep_scale = 1.0 / (1.0 - params.dropout_p);
    for (std::size_t j = 0; j < d; ++j) {
      cache.mask[j] = rng.bernoulli(params.dropout_p) ? 0.0 : keep_scale;
    }
  }
  cache.z_drop.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double z = cache.z_pre[j] > 0.0 ? cache.z_pre[j] : 0.0;
    cache.z_drop[j] = z * cache.mask[j];
  }

  Vector flat(params.flat_size());
  matvec(params.W2, cache.z_drop, flat);
  axpy(1.0, params.b2, flat);

  Forecast out;
  out.values = Matrix(horizon, f_out);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t j = 0; j < f_out; ++j) {
      out.values(t, j) = flat[t * f_out + j] + x_t_raw[j];
    }
  }
  return {std::move(out), std::move(cache)};
}

std::pair<DecoderGrads, Vector> decode_backward(const DecodeCache& cache,
                                                const DecoderParams& params,
                                                const Matrix& upstream) {
  const std::size_t d = cache.latent_width;
  if (d != params.latent_width() || cache.mask.size() != d ||
      cache.horizon * cache.f_out != params.flat_size()) {
    throw std::logic_error("decode_backward: cache/params mismatch");
  }
  if (upstream.rows != cache.horizon || upstream.cols != cache.f_out) {
    throw std::logic_error("decode_backward: upstream shape mismatch");
  }

  DecoderGrads grads;
  grads.W1 = Matrix(d, d);
  grads.b1.assign(d, 0.0);
  grads.W2 = Matrix(params.flat_size(), d);
  grads.b2.assign(params.flat_size(), 0.0);

  // The residual path has unit jacobian, so dflat is upstream flattened row-major.
  std::span<const double> dflat(upstream.data.data(), upstream.data.size());
  outer_acc(grads.W2, dflat, cache.z_drop);
  axpy(1.0, dflat, grads.b2);

  Vector dz_drop(d);
  matvec_t(params.W2, dflat, dz_drop);

  Vector dz_pre(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double relu_grad = cache.z_pre[j] > 0.0 ? 1.0 : 0.0;
    dz_pre[j] = dz_drop[j] * cache.mask[j] * relu_grad;
  }
  outer_acc(grads.W1, dz_pre, cache.h);
  axpy(1.0, dz_pre, grads.b1);

  Vector dh(d);
  matvec_t(params.W1, dz_pre, dh);
  return {std::move(grads), std::move(dh)};
}

}  // namespace qssm

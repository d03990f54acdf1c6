#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qssm/backbone.hpp"
#include "qssm/rng.hpp"

using namespace qssm;

namespace {

BackboneParams random_params(std::size_t f_in, std::size_t k, std::size_t d,
                             RngStream& rng) {
  BackboneParams p;
  p.P_weight = Matrix(k, f_in);
  for (double& v : p.P_weight.data) v = 0.6 * rng.normal();
  p.P_bias.resize(k);
  for (double& v : p.P_bias) v = 0.3 * rng.normal();
  p.W_weight = Matrix(d, k);
  for (double& v : p.W_weight.data) v = 0.6 * rng.normal();
  p.b.resize(d);
  for (double& v : p.b) v = 0.3 * rng.normal();
  p.alpha = rng.normal();
  p.ln_gamma.resize(d);
  for (double& v : p.ln_gamma) v = 1.0 + 0.2 * rng.normal();
  p.ln_beta.resize(d);
  for (double& v : p.ln_beta) v = 0.2 * rng.normal();
  return p;
}

Matrix random_window(std::size_t w, std::size_t f_in, RngStream& rng) {
  Matrix m(w, f_in);
  for (double& v : m.data) v = rng.normal();
  return m;
}

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 0.01});
}

}  // namespace

TEST_CASE("layer_norm frozen example") {
  const Vector v = {1, 2, 3, 4};
  const Vector gamma = {1, 1, 1, 1};
  const Vector beta = {0, 0, 0, 0};
  const Vector out = layer_norm(v, gamma, beta);
  CHECK(std::fabs(out[0] - -1.3416354199689269) < 1e-14);
  CHECK(std::fabs(out[1] - -0.447211806656309) < 1e-14);
  CHECK(std::fabs(out[2] - 0.447211806656309) < 1e-14);
  CHECK(std::fabs(out[3] - 1.3416354199689269) < 1e-14);

  const Vector gamma2 = {2, 2, 2, 2};
  const Vector beta2 = {1, 1, 1, 1};
  const Vector affine = layer_norm(v, gamma2, beta2);
  for (int i = 0; i < 4; ++i) {
    CHECK(affine[i] == doctest::Approx(2.0 * out[i] + 1.0).epsilon(1e-14));
  }

  const Vector short_beta = {0.0};
  CHECK_THROWS_AS(layer_norm(v, gamma, short_beta), std::invalid_argument);
}

TEST_CASE("layer_norm output is shift invariant up to rounding") {
  RngStream rng(3);
  Vector v(8), gamma(8, 1.0), beta(8, 0.0);
  for (double& x : v) x = rng.normal();
  Vector shifted = v;
  for (double& x : shifted) x += 7.25;
  const Vector a = layer_norm(v, gamma, beta);
  const Vector b = layer_norm(shifted, gamma, beta);
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("calendar_scalar averages the selected columns") {
  Matrix window(2, 3);
  window(0, 0) = 1;
  window(0, 1) = 2;
  window(0, 2) = 3;
  window(1, 0) = 4;
  window(1, 1) = 5;
  window(1, 2) = 6;
  const std::vector<std::size_t> idx = {0, 2};
  CHECK(calendar_scalar(window, idx) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(calendar_scalar(window, {}) == 0.0);
  const std::vector<std::size_t> bad = {3};
  CHECK_THROWS_AS(calendar_scalar(window, bad), std::invalid_argument);
}

TEST_CASE("step blends the normalized update with the previous state") {
  RngStream rng(5);
  BackboneParams p = random_params(3, 4, 4, rng);
  Vector h_prev(4);
  for (double& v : h_prev) v = rng.normal();
  Matrix window = random_window(1, 3, rng);
  const double c = 0.4;
  const double g = 0.3;

  Vector v(4);
  matvec(p.P_weight, window.row(0), v);
  axpy(1.0, p.P_bias, v);
  Vector u_pre(4);
  matvec(p.W_weight, v, u_pre);
  axpy(1.0, p.b, u_pre);
  for (double& x : u_pre) x += p.alpha * c;
  const Vector u = layer_norm(u_pre, p.ln_gamma, p.ln_beta);

  const HiddenState h = step(h_prev, window.row(0), c, g, p);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::fabs(h[j] - ((1.0 - g) * h_prev[j] + g * u[j])) < 1e-14);
  }
}

TEST_CASE("step contracts state differences by exactly (1-g)") {
  RngStream rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    BackboneParams p = random_params(3, 5, 6, rng);
    Matrix window = random_window(1, 3, rng);
    Vector h1(6), h2(6);
    for (double& v : h1) v = rng.normal();
    for (double& v : h2) v = rng.normal();
    const double g = 0.05 + 0.9 * rng.uniform();
    const HiddenState s1 = step(h1, window.row(0), 0.2, g, p);
    const HiddenState s2 = step(h2, window.row(0), 0.2, g, p);
    Vector dh(6), ds(6);
    for (std::size_t j = 0; j < 6; ++j) {
      dh[j] = h1[j] - h2[j];
      ds[j] = s1[j] - s2[j];
    }
    CHECK(std::fabs(l2_norm(ds) / l2_norm(dh) - (1.0 - g)) < 1e-10);
  }
}

TEST_CASE("encode equals repeated single steps") {
  RngStream rng(11);
  BackboneParams p = random_params(3, 4, 5, rng);
  Matrix window = random_window(6, 3, rng);
  const std::vector<std::size_t> cal = {1};
  const double g = 0.37;

  auto [h, cache] = encode(window, g, p, cal);
  const double c = calendar_scalar(window, cal);
  CHECK(cache.c == c);
  HiddenState manual(5, 0.0);
  for (std::size_t t = 0; t < 6; ++t) {
    manual = step(manual, window.row(t), c, g, p);
  }
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(h[j] - manual[j]) < 1e-13);

  CHECK(cache.window_len == 6);
  CHECK(!cache.stepwise);
  CHECK(cache.gates.size() == 6);
  for (double gv : cache.gates) CHECK(gv == g);
  for (std::size_t j = 0; j < 5; ++j) CHECK(cache.h(0, j) == 0.0);
  for (std::size_t j = 0; j < 5; ++j) CHECK(cache.h(6, j) == h[j]);
  for (std::size_t i = 0; i < window.size(); ++i) {
    CHECK(cache.x.data[i] == window.data[i]);
  }
}

TEST_CASE("encode_stepwise with equal gates matches encode") {
  RngStream rng(13);
  BackboneParams p = random_params(2, 3, 4, rng);
  Matrix window = random_window(5, 2, rng);
  const Vector gates(5, 0.42);
  auto [h_uniform, c1] = encode(window, 0.42, p, {});
  auto [h_step, c2] = encode_stepwise(window, gates, p, {});
  CHECK(c2.stepwise);
  for (std::size_t j = 0; j < 4; ++j) CHECK(h_uniform[j] == h_step[j]);
}

TEST_CASE("calendar shift is removed by the layer norm") {
  RngStream rng(17);
  BackboneParams p = random_params(3, 4, 4, rng);
  Matrix window = random_window(4, 3, rng);

  BackboneParams zero_alpha = p;
  zero_alpha.alpha = 0.0;
  SUBCASE("no calendar columns: bit-identical") {
    auto [h_a, ca] = encode(window, 0.5, p, {});
    auto [h_z, cz] = encode(window, 0.5, zero_alpha, {});
    for (std::size_t j = 0; j < 4; ++j) CHECK(h_a[j] == h_z[j]);
  }
  SUBCASE("calendar columns: equal up to rounding") {
    const std::vector<std::size_t> cal = {2};
    auto [h_a, ca] = encode(window, 0.5, p, cal);
    auto [h_z, cz] = encode(window, 0.5, zero_alpha, cal);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(h_a[j] - h_z[j]) < 1e-12);
  }
}

TEST_CASE("encode_backward matches finite differences") {
  RngStream rng(19);
  const std::size_t f_in = 3, k = 3, d = 3, w = 3;
  BackboneParams p = random_params(f_in, k, d, rng);
  Matrix window = random_window(w, f_in, rng);
  const std::vector<std::size_t> cal = {1};
  const double g = 0.6;
  Vector upstream(d);
  for (double& v : upstream) v = rng.normal();

  const auto loss_for = [&](const BackboneParams& params, const Matrix& win,
                            double gate) {
    auto [h, cache] = encode(win, gate, params, cal);
    return dot(upstream, h);
  };

  auto [h, cache] = encode(window, g, p, cal);
  const EncodeBackwardResult res = encode_backward(cache, p, upstream);

  const double step_sz = 1e-6;
  const auto fd_param = [&](auto&& mutate) {
    BackboneParams up = p, down = p;
    mutate(up, step_sz);
    mutate(down, -step_sz);
    return (loss_for(up, window, g) - loss_for(down, window, g)) /
           (2.0 * step_sz);
  };

  for (std::size_t i = 0; i < p.P_weight.size(); ++i) {
    const double fd = fd_param(
        [&](BackboneParams& q, double s) { q.P_weight.data[i] += s; });
    CHECK(rel_err(res.params.P_weight.data[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.P_bias.size(); ++i) {
    const double fd =
        fd_param([&](BackboneParams& q, double s) { q.P_bias[i] += s; });
    CHECK(rel_err(res.params.P_bias[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.W_weight.size(); ++i) {
    const double fd = fd_param(
        [&](BackboneParams& q, double s) { q.W_weight.data[i] += s; });
    CHECK(rel_err(res.params.W_weight.data[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.b.size(); ++i) {
    const double fd =
        fd_param([&](BackboneParams& q, double s) { q.b[i] += s; });
    CHECK(rel_err(res.params.b[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.ln_gamma.size(); ++i) {
    const double fd =
        fd_param([&](BackboneParams& q, double s) { q.ln_gamma[i] += s; });
    CHECK(rel_err(res.params.ln_gamma[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.ln_beta.size(); ++i) {
    const double fd =
        fd_param([&](BackboneParams& q, double s) { q.ln_beta[i] += s; });
    CHECK(rel_err(res.params.ln_beta[i], fd) < 1e-6);
  }

  SUBCASE("alpha is killed by the layer norm") {
    const double fd =
        fd_param([&](BackboneParams& q, double s) { q.alpha += s; });
    CHECK(std::fabs(res.params.alpha) < 1e-12);
    CHECK(std::fabs(fd) < 1e-8);
  }

  SUBCASE("post-projection bias components are nonzero but sum to zero") {
    double total = 0.0, magnitude = 0.0;
    for (double v : res.params.b) {
      total += v;
      magnitude += std::fabs(v);
    }
    CHECK(std::fabs(total) < 1e-10);
    CHECK(magnitude > 1e-6);
  }

  SUBCASE("input gradients cover the calendar path") {
    for (std::size_t i = 0; i < window.size(); ++i) {
      Matrix up_w = window, down_w = window;
      up_w.data[i] += step_sz;
      down_w.data[i] -= step_sz;
      const double fd =
          (loss_for(p, up_w, g) - loss_for(p, down_w, g)) / (2.0 * step_sz);
      CHECK(rel_err(res.inputs.data[i], fd) < 1e-6);
    }
  }

  SUBCASE("gate gradient sums the per-step contributions") {
    const double fd =
        (loss_for(p, window, g + step_sz) - loss_for(p, window, g - step_sz)) /
        (2.0 * step_sz);
    CHECK(rel_err(res.gate, fd) < 1e-6);
    double total = 0.0;
    for (double v : res.gate_per_step) total += v;
    CHECK(res.gate == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("stepwise gate gradients match per-step finite differences") {
  RngStream rng(29);
  const std::size_t f_in = 2, k = 3, d = 3, w = 4;
  BackboneParams p = random_params(f_in, k, d, rng);
  Matrix window = random_window(w, f_in, rng);
  Vector gates(w);
  for (double& gv : gates) gv = 0.1 + 0.8 * rng.uniform();
  Vector upstream(d);
  for (double& v : upstream) v = rng.normal();

  auto [h, cache] = encode_stepwise(window, gates, p, {});
  const EncodeBackwardResult res = encode_backward(cache, p, upstream);

  const double step_sz = 1e-6;
  for (std::size_t t = 0; t < w; ++t) {
    Vector up_g = gates, down_g = gates;
    up_g[t] += step_sz;
    down_g[t] -= step_sz;
    const double lu = dot(upstream, encode_stepwise(window, up_g, p, {}).first);
    const double ld =
        dot(upstream, encode_stepwise(window, down_g, p, {}).first);
    const double fd = (lu - ld) / (2.0 * step_sz);
    CHECK(rel_err(res.gate_per_step[t], fd) < 1e-6);
  }
}

TEST_CASE("encode input validation") {
  RngStream rng(31);
  BackboneParams p = random_params(3, 4, 4, rng);
  Matrix empty(0, 3);
  CHECK_THROWS_AS(encode(empty, 0.5, p, {}), std::invalid_argument);
  Matrix narrow = random_window(2, 2, rng);
  CHECK_THROWS_AS(encode(narrow, 0.5, p, {}), std::invalid_argument);
  Matrix window = random_window(2, 3, rng);
  const Vector too_few_gates = {0.5};
  CHECK_THROWS_AS(encode_stepwise(window, too_few_gates, p, {}),
                  std::invalid_argument);
}

TEST_CASE("encode_backward rejects mismatched cache or upstream") {
  RngStream rng(37);
  BackboneParams p = random_params(3, 4, 4, rng);
  Matrix window = random_window(3, 3, rng);
  auto [h, cache] = encode(window, 0.5, p, {});

  const Vector bad_upstream(5, 1.0);
  CHECK_THROWS_AS(encode_backward(cache, p, bad_upstream), std::logic_error);

  BackboneParams other = random_params(3, 4, 5, rng);
  const Vector upstream(4, 1.0);
  CHECK_THROWS_AS(encode_backward(cache, other, upstream), std::logic_error);
}

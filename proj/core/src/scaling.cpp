#include "qssm/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "qssm/backbone.hpp"
#include "qssm/config.hpp"
#include "qssm/decoder.hpp"
#include "qssm/rng.hpp"

namespace qssm {

namespace {

using Clock = std::chrono::steady_clock;

double fill_normal(Matrix& m, RngStream& rng) {
  double acc = 0.0;
  for (double& v : m.data) {
    v = rng.normal();
    acc += v;
  }
  return acc;
}

// Median per-iteration time of fn, with the iteration count calibrated
// so each measured batch runs long enough to swamp timer noise.
double time_median(const std::function<double()>& fn, int repeats,
                   double& checksum) {
  constexpr double kMinBatchSeconds = 0.02;
  std::size_t iters = 1;
  while (true) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < iters; ++i) checksum += fn();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs >= kMinBatchSeconds) break;
    const double target = std::max(secs, 1e-9);
    iters = std::max(iters * 2,
                     static_cast<std::size_t>(static_cast<double>(iters) *
                                              kMinBatchSeconds / target) +
                         1);
  }
  std::vector<double> times(static_cast<std::size_t>(repeats));
  for (double& t : times) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < iters; ++i) checksum += fn();
    t = std::chrono::duration<double>(Clock::now() - t0).count() /
        static_cast<double>(iters);
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

double fit_slope(const std::vector<ScalePoint>& points) {
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ScalePoint& p : points) {
    const double x = std::log(static_cast<double>(p.size));
    const double y = std::log(p.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> successive_ratios(const std::vector<ScalePoint>& points) {
  std::vector<double> out;
  for (std::size_t i = 1; i < points.size(); ++i) {
    out.push_back(points[i].seconds / points[i - 1].seconds);
  }
  return out;
}

}  // namespace

ScalingReport run_scaling_bench(std::uint64_t seed, int repeats) {
  ScalingReport report;
  RngStream rng(seed);

  constexpr std::size_t kFIn = 8;
  constexpr std::size_t kProj = 32;
  constexpr std::size_t kLatent = 32;
  constexpr std::size_t kFOut = 8;

  auto make_backbone = [&rng, &report](std::size_t latent) {
    BackboneParams p;
    p.P_weight = Matrix(kProj, kFIn);
    p.P_bias.assign(kProj, 0.0);
    p.W_weight = Matrix(latent, kProj);
    p.b.assign(latent, 0.0);
    p.ln_gamma.assign(latent, 1.0);
    p.ln_beta.assign(latent, 0.0);
    report.checksum += fill_normal(p.P_weight, rng);
    report.checksum += fill_normal(p.W_weight, rng);
    return p;
  };
  auto time_encode = [&](const BackboneParams& backbone, std::size_t w) {
    Matrix window(w, kFIn);
    report.checksum += fill_normal(window, rng);
    Vector upstream_h(backbone.latent_width(), 1.0);
    const std::function<double()> body = [&]() {
      auto [h, cache] = encode(window, 0.5, backbone, {});
      EncodeBackwardResult back = encode_backward(cache, backbone, upstream_h);
      return h[0] + back.params.b[0];
    };
    ScalePoint point;
    point.size = w;
    point.seconds = time_median(body, repeats, report.checksum);
    return point;
  };

  const BackboneParams backbone = make_backbone(kLatent);
  for (std::size_t w : {64u, 128u, 256u, 512u}) {
    report.window_sweep.push_back(time_encode(backbone, w));
  }

  Vector hidden(kLatent);
  for (double& v : hidden) v = rng.normal();
  Vector x_last(kFOut);
  for (double& v : x_last) v = rng.normal();
  for (std::size_t h : {24u, 48u, 96u, 192u}) {
    DecoderParams decoder;
    decoder.W1 = Matrix(kLatent, kLatent);
    decoder.b1.assign(kLatent, 0.0);
    decoder.W2 = Matrix(h * kFOut, kLatent);
    decoder.b2.assign(h * kFOut, 0.0);
    decoder.dropout_p = 0.0;
    report.checksum += fill_normal(decoder.W1, rng);
    report.checksum += fill_normal(decoder.W2, rng);
    Matrix upstream(h, kFOut);
    upstream.fill(1.0);
    RngStream unused(0);
    const std::function<double()> body = [&]() {
      auto [forecast, cache] =
          decode(hidden, x_last, decoder, RunMode::Eval, unused);
      auto [grads, dh] = decode_backward(cache, decoder, upstream);
      return forecast.values(0, 0) + dh[0] + grads.b1[0];
    };
    ScalePoint point;
    point.size = h;
    point.seconds = time_median(body, repeats, report.checksum);
    report.horizon_sweep.push_back(point);
  }

  for (std::size_t d : {32u, 128u}) {
    const BackboneParams wide = make_backbone(d);
    ScalePoint point = time_encode(wide, 64);
    point.size = d;
    report.latent_sweep.push_back(point);
  }

  report.window_ratios = successive_ratios(report.window_sweep);
  report.horizon_ratios = successive_ratios(report.horizon_sweep);
  report.latent_ratio4 =
      report.latent_sweep[1].seconds / report.latent_sweep[0].seconds;
  report.window_exponent = fit_slope(report.window_sweep);
  report.horizon_exponent = fit_slope(report.horizon_sweep);
  return report;
}

std::string scaling_csv(const ScalingReport& report) {
  std::ostringstream out;
  out << "sweep,size,seconds\n";
  for (const ScalePoint& p : report.window_sweep) {
    out << "window," << p.size << ',' << format_double(p.seconds) << '\n';
  }
  for (const ScalePoint& p : report.horizon_sweep) {
    out << "horizon," << p.size << ',' << format_double(p.seconds) << '\n';
  }
  for (const ScalePoint& p : report.latent_sweep) {
    out << "latent," << p.size << ',' << format_double(p.seconds) << '\n';
  }
  return out.str();
}

std::string scaling_text(const ScalingReport& report) {
  std::ostringstream out;
  auto print_sweep = [&out](const char* name,
                            const std::vector<ScalePoint>& sweep,
                            const std::vector<double>& ratios,
                            double exponent) {
    out << name << " sweep:\n";
    for (const ScalePoint& p : sweep) {
      char line[96];
      std::snprintf(line, sizeof(line), "  size %4zu  %.6f ms\n", p.size,
                    p.seconds * 1e3);
      out << line;
    }
    out << "  doubling ratios:";
    for (double r : ratios) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.3f", r);
      out << buf;
    }
    char exp_buf[64];
    std::snprintf(exp_buf, sizeof(exp_buf), "\n  fitted exponent: %.3f\n",
                  exponent);
    out << exp_buf;
  };
  print_sweep("window", report.window_sweep, report.window_ratios,
              report.window_exponent);
  print_sweep("horizon", report.horizon_sweep, report.horizon_ratios,
              report.horizon_exponent);
  out << "latent sweep:\n";
  for (const ScalePoint& p : report.latent_sweep) {
    char line[96];
    std::snprintf(line, sizeof(line), "  size %4zu  %.6f ms\n", p.size,
                  p.seconds * 1e3);
    out << line;
  }
  char ratio_buf[48];
  std::snprintf(ratio_buf, sizeof(ratio_buf), "  4x ratio: %.3f\n",
                report.latent_ratio4);
  out << ratio_buf;
  return out.str();
}

}  // namespace qssm

#include "qssm/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qssm/config.hpp"
#include "qssm/rng.hpp"

namespace qssm {

RawSeries make_sine_series(const SineSpec& spec) {
  if (spec.length == 0 || spec.period <= 0.0 || spec.step_seconds <= 0) {
    throw std::invalid_argument("sine spec: length, period, and step must be positive");
  }
  RngStream rng(spec.seed);
  RawSeries series;
  series.columns = {"value"};
  series.values = Matrix(spec.length, 1);
  series.timestamps.reserve(spec.length);
  const std::int64_t epoch0 = spec.start.epoch_seconds();
  for (std::size_t i = 0; i < spec.length; ++i) {
    series.timestamps.push_back(
        datetime_from_epoch(epoch0 + static_cast<std::int64_t>(i) * spec.step_seconds));
    double v = spec.amplitude *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / spec.period);
    if (spec.noise_std > 0.0) v += spec.noise_std * rng.normal();
    series.values(i, 0) = v;
  }
  return series;
}

std::string sine_csv(const SineSpec& spec) {
  const RawSeries series = make_sine_series(spec);
  std::ostringstream out;
  out << "date,value\n";
  char stamp[32];
  for (std::size_t i = 0; i < series.rows(); ++i) {
    const DateTime& ts = series.timestamps[i];
    std::snprintf(stamp, sizeof(stamp), "%04d-%02d-%02d %02d:%02d:%02d",
                  ts.year, ts.month, ts.day, ts.hour, ts.minute, ts.second);
    out << stamp << ',' << format_double(series.values(i, 0)) << '\n';
  }
  return out.str();
}

void write_sine_csv(const std::string& path, const SineSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << sine_csv(spec);
}

}  // namespace qssm

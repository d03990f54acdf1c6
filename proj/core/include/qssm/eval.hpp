#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qssm/data.hpp"
#include "qssm/decoder.hpp"
#include "qssm/model.hpp"

namespace qssm {

// Mean over all entries of squared / absolute error.
double mse(const Matrix& pred, const Matrix& truth);
double mae(const Matrix& pred, const Matrix& truth);

// Baseline: every forecast row repeats the last observed target row.
Forecast naive_last_value(const WindowSample& sample);

struct SplitMetrics {
  double mse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
};

// Mean of per-sample metrics across the split, eval-mode forward.
SplitMetrics metrics_over(const QssmModel& model,
                          const std::vector<WindowSample>& samples);
SplitMetrics naive_metrics_over(const std::vector<WindowSample>& samples);

struct ForecastReport {
  int schema_version = 1;
  std::string dataset;
  std::size_t horizon = 0;
  std::string split;
  double mse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  double seconds = 0.0;

  bool operator==(const ForecastReport&) const = default;
};

ForecastReport evaluate(const QssmModel& model,
                        const std::vector<WindowSample>& samples,
                        const std::string& dataset_id, const std::string& split,
                        const RunConfig& cfg);

std::string report_json(const ForecastReport& report);
ForecastReport report_from_json(const std::string& text);
std::string report_csv_header();
std::string report_csv_row(const ForecastReport& report);

}  // namespace qssm

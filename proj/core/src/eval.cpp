#include "qssm/eval.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qssm {

double mse(const Matrix& pred, const Matrix& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols) {
    throw std::invalid_argument("mse: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data[i] - truth.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double mae(const Matrix& pred, const Matrix& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols) {
    throw std::invalid_argument("mae: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    acc += std::fabs(pred.data[i] - truth.data[i]);
  }
  return acc / static_cast<double>(pred.size());
}

Forecast naive_last_value(const WindowSample& sample) {
  Forecast out;
  out.values = Matrix(sample.y.rows, sample.y.cols);
  for (std::size_t t = 0; t < out.values.rows; ++t) {
    for (std::size_t j = 0; j < out.values.cols; ++j) {
      out.values(t, j) = sample.x_last[j];
    }
  }
  return out;
}

SplitMetrics metrics_over(const QssmModel& model,
                          const std::vector<WindowSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("metrics_over: empty split");
  }
  SplitMetrics m;
  m.n = samples.size();
  for (const WindowSample& s : samples) {
    const Forecast f = model.predict(s);
    m.mse += mse(f.values, s.y);
    m.mae += mae(f.values, s.y);
  }
  m.mse /= static_cast<double>(m.n);
  m.mae /= static_cast<double>(m.n);
  return m;
}

SplitMetrics naive_metrics_over(const std::vector<WindowSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("naive_metrics_over: empty split");
  }
  SplitMetrics m;
  m.n = samples.size();
  for (const WindowSample& s : samples) {
    const Forecast f = naive_last_value(s);
    m.mse += mse(f.values, s.y);
    m.mae += mae(f.values, s.y);
  }
  m.mse /= static_cast<double>(m.n);
  m.mae /= static_cast<double>(m.n);
  return m;
}

ForecastReport evaluate(const QssmModel& model,
                        const std::vector<WindowSample>& samples,
                        const std::string& dataset_id, const std::string& split,
                        const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const SplitMetrics m = metrics_over(model, samples);
  const auto t1 = std::chrono::steady_clock::now();
  if (m.mae > std::sqrt(m.mse) + 1e-12) {
    throw std::logic_error("evaluate: aggregate mae exceeds sqrt(mse)");
  }
  ForecastReport report;
  report.dataset = dataset_id;
  report.horizon = model.dims().horizon;
  report.split = split;
  report.mse = m.mse;
  report.mae = m.mae;
  report.n = m.n;
  report.seed = cfg.train.seed;
  report.config_hash = config_hash(cfg);
  report.seconds = std::chrono::duration<double>(t1 - t0).count();
  return report;
}

std::string report_json(const ForecastReport& report) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["dataset"] = report.dataset;
  j["horizon"] = report.horizon;
  j["split"] = report.split;
  j["mse"] = report.mse;
  j["mae"] = report.mae;
  j["n"] = report.n;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  j["seconds"] = report.seconds;
  return j.dump(2) + "\n";
}

ForecastReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report: bad JSON: ") + e.what());
  }
  ForecastReport report;
  try {
    report.schema_version = j.at("schema_version").get<int>();
    report.dataset = j.at("dataset").get<std::string>();
    report.horizon = j.at("horizon").get<std::size_t>();
    report.split = j.at("split").get<std::string>();
    report.mse = j.at("mse").get<double>();
    report.mae = j.at("mae").get<double>();
    report.n = j.at("n").get<std::size_t>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.config_hash = j.at("config_hash").get<std::string>();
    report.seconds = j.at("seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("report: missing field: ") + e.what());
  }
  if (report.schema_version != 1) {
    throw std::runtime_error("report: unsupported schema_version " +
                             std::to_string(report.schema_version));
  }
  return report;
}

std::string report_csv_header() {
  return "dataset,H,split,mse,mae,n,seed,config_hash,seconds\n";
}

std::string report_csv_row(const ForecastReport& report) {
  std::ostringstream out;
  out << report.dataset << ',' << report.horizon << ',' << report.split << ','
      << format_double(report.mse) << ',' << format_double(report.mae) << ','
      << report.n << ',' << report.seed << ',' << report.config_hash << ','
      << format_double(report.seconds) << '\n';
  return out.str();
}

}  // namespace qssm

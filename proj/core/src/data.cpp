#include "qssm/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qssm {

namespace {

constexpr int kDaysInMonth[12] = {31, 28, 31, 30, 31, 30,
                                  31, 31, 30, 31, 30, 31};

int days_in_month(int year, int month) {
  if (month == 2 && is_leap_year(year)) return 29;
  return kDaysInMonth[month - 1];
}

std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
  return ((x % m) + m) % m;
}

int parse_digits(const std::string& text, std::size_t& pos, int count,
                 const char* what) {
  if (pos + count > text.size()) {
    throw std::runtime_error(std::string("datetime: truncated ") + what);
  }
  int v = 0;
  for (int i = 0; i < count; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') {
      throw std::runtime_error(std::string("datetime: expected digit in ") +
                               what);
    }
    v = v * 10 + (c - '0');
  }
  pos += count;
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

}  // namespace

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

DateTime datetime_from_epoch(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  DateTime dt;
  dt.day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  dt.month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  dt.year = static_cast<int>(y + (dt.month <= 2 ? 1 : 0));
  dt.hour = static_cast<int>(rem / 3600);
  dt.minute = static_cast<int>((rem % 3600) / 60);
  dt.second = static_cast<int>(rem % 60);
  return dt;
}

std::int64_t DateTime::epoch_seconds() const {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 +
         minute * 60 + second;
}

double DateTime::fractional_hour() const {
  return hour + minute / 60.0 + second / 3600.0;
}

int DateTime::day_of_year() const {
  return static_cast<int>(days_from_civil(year, month, day) -
                          days_from_civil(year, 1, 1)) +
         1;
}

int DateTime::day_of_week() const {
  return static_cast<int>(floor_mod(days_from_civil(year, month, day) + 3, 7));
}

DateTime parse_datetime(const std::string& text, const std::string& format) {
  DateTime dt;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] != '%') {
      if (pos >= text.size() || text[pos] != format[f]) {
        throw std::runtime_error("datetime: '" + text +
                                 "' does not match format '" + format + "'");
      }
      ++pos;
      continue;
    }
    if (++f >= format.size()) {
      throw std::invalid_argument("datetime format: trailing %");
    }
    switch (format[f]) {
      case 'Y': dt.year = parse_digits(text, pos, 4, "year"); break;
      case 'm': dt.month = parse_digits(text, pos, 2, "month"); break;
      case 'd': dt.day = parse_digits(text, pos, 2, "day"); break;
      case 'H': dt.hour = parse_digits(text, pos, 2, "hour"); break;
      case 'M': dt.minute = parse_digits(text, pos, 2, "minute"); break;
      case 'S': dt.second = parse_digits(text, pos, 2, "second"); break;
      case '%':
        if (pos >= text.size() || text[pos] != '%') {
          throw std::runtime_error("datetime: '" + text +
                                   "' does not match format '" + format + "'");
        }
        ++pos;
        break;
      default:
        throw std::invalid_argument(std::string("datetime format: unsupported directive %") +
                                    format[f]);
    }
  }
  if (pos != text.size()) {
    throw std::runtime_error("datetime: trailing characters in '" + text + "'");
  }
  if (dt.month < 1 || dt.month > 12 || dt.day < 1 ||
      dt.day > days_in_month(dt.year, dt.month) || dt.hour > 23 ||
      dt.minute > 59 || dt.second > 59) {
    throw std::runtime_error("datetime: out-of-range field in '" + text + "'");
  }
  return dt;
}

RawSeries parse_csv(const std::string& text, const std::string& datetime_format,
                    const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(source_name + ": empty file");
  }
  const auto header = split_fields(line);
  if (header.size() < 2) {
    throw std::runtime_error(source_name +
                             ": header needs a datetime column plus at least one value column");
  }
  RawSeries series;
  series.columns.assign(header.begin() + 1, header.end());
  const std::size_t f_raw = series.columns.size();

  std::vector<double> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != f_raw + 1) {
      throw std::runtime_error(source_name + ": row " + std::to_string(line_no) +
                               " has " + std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(f_raw + 1));
    }
    try {
      series.timestamps.push_back(parse_datetime(fields[0], datetime_format));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(source_name + ": row " + std::to_string(line_no) +
                               ", column " + header[0] + ": " + e.what());
    }
    for (std::size_t j = 0; j < f_raw; ++j) {
      const std::string& cell = fields[j + 1];
      std::size_t pos = 0;
      double v = 0.0;
      bool ok = !cell.empty();
      if (ok) {
        try {
          v = std::stod(cell, &pos);
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || pos != cell.size() || !std::isfinite(v)) {
        throw std::runtime_error(source_name + ": row " + std::to_string(line_no) +
                                 ", column " + series.columns[j] +
                                 ": cannot parse '" + cell + "' as a number");
      }
      data.push_back(v);
    }
  }
  const std::size_t n = series.timestamps.size();
  if (n == 0) {
    throw std::runtime_error(source_name + ": no data rows");
  }
  series.values = Matrix(n, f_raw);
  series.values.data = std::move(data);

  if (n >= 2) {
    const std::int64_t spacing = series.timestamps[1].epoch_seconds() -
                                 series.timestamps[0].epoch_seconds();
    if (spacing <= 0) {
      throw std::runtime_error(source_name + ": timestamps not strictly increasing at row 3");
    }
    for (std::size_t i = 1; i < n; ++i) {
      const std::int64_t gap = series.timestamps[i].epoch_seconds() -
                               series.timestamps[i - 1].epoch_seconds();
      if (gap <= 0) {
        throw std::runtime_error(source_name + ": timestamps not strictly increasing at row " +
                                 std::to_string(i + 2));
      }
      if (gap != spacing) {
        throw std::runtime_error(source_name + ": irregular timestamp spacing at row " +
                                 std::to_string(i + 2) + " (" + std::to_string(gap) +
                                 "s, expected " + std::to_string(spacing) + "s)");
      }
    }
  }
  return series;
}

RawSeries load_csv(const std::string& path, const std::string& datetime_format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), datetime_format, path);
}

SplitRanges chronological_split(std::size_t n, std::size_t window,
                                std::size_t horizon) {
  // floor(0.6 n) and floor(0.8 n), kept in exact integer arithmetic
  const std::size_t b1 = n * 6 / 10;
  const std::size_t b2 = n * 8 / 10;
  SplitRanges s;
  s.train = {0, b1};
  s.val = {b1, b2};
  s.test = {b2, n};
  const std::size_t need = window + horizon;
  const char* names[3] = {"train", "validation", "test"};
  const IndexRange* ranges[3] = {&s.train, &s.val, &s.test};
  for (int i = 0; i < 3; ++i) {
    if (ranges[i]->size() < need) {
      throw std::invalid_argument(
          std::string("split: ") + names[i] + " split has " +
          std::to_string(ranges[i]->size()) + " rows, need at least " +
          std::to_string(need) + " (window " + std::to_string(window) +
          " + horizon " + std::to_string(horizon) + ")");
    }
  }
  return s;
}

Normalizer fit_normalizer(const Matrix& values, IndexRange train_range,
                          const std::vector<std::string>& columns) {
  if (train_range.size() == 0 || train_range.end > values.rows) {
    throw std::invalid_argument("fit_normalizer: bad train range");
  }
  if (!columns.empty() && columns.size() != values.cols) {
    throw std::invalid_argument("fit_normalizer: column name count mismatch");
  }
  const std::size_t f = values.cols;
  const double n = static_cast<double>(train_range.size());
  Normalizer norm;
  norm.mean.assign(f, 0.0);
  norm.stddev.assign(f, 0.0);
  for (std::size_t i = train_range.begin; i < train_range.end; ++i) {
    for (std::size_t j = 0; j < f; ++j) norm.mean[j] += values(i, j);
  }
  for (std::size_t j = 0; j < f; ++j) norm.mean[j] /= n;
  for (std::size_t i = train_range.begin; i < train_range.end; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double c = values(i, j) - norm.mean[j];
      norm.stddev[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < f; ++j) {
    norm.stddev[j] = std::sqrt(norm.stddev[j] / n);
    if (norm.stddev[j] <= 0.0) {
      const std::string name =
          columns.empty() ? std::to_string(j) : columns[j];
      throw std::runtime_error("normalizer: column " + name +
                               " is constant on the training split");
    }
  }
  return norm;
}

Matrix Normalizer::apply(const Matrix& values) const {
  if (values.cols != mean.size()) {
    throw std::invalid_argument("normalizer: column count mismatch");
  }
  Matrix out(values.rows, values.cols);
  for (std::size_t i = 0; i < values.rows; ++i) {
    for (std::size_t j = 0; j < values.cols; ++j) {
      out(i, j) = (values(i, j) - mean[j]) / stddev[j];
    }
  }
  return out;
}

Matrix Normalizer::invert(const Matrix& values) const {
  if (values.cols != mean.size()) {
    throw std::invalid_argument("normalizer: column count mismatch");
  }
  Matrix out(values.rows, values.cols);
  for (std::size_t i = 0; i < values.rows; ++i) {
    for (std::size_t j = 0; j < values.cols; ++j) {
      out(i, j) = values(i, j) * stddev[j] + mean[j];
    }
  }
  return out;
}

AugmentedMatrix add_calendar_features(const Matrix& values,
                                      const std::vector<DateTime>& timestamps,
                                      CalendarMode mode) {
  AugmentedMatrix out;
  if (mode == CalendarMode::None) {
    out.values = values;
    return out;
  }
  if (timestamps.size() != values.rows) {
    throw std::invalid_argument("calendar features: need one timestamp per row");
  }
  constexpr double kTau = 2.0 * std::numbers::pi;
  const std::size_t f = values.cols;
  out.values = Matrix(values.rows, f + 4);
  out.calendar_indices = {f, f + 1, f + 2, f + 3};
  for (std::size_t i = 0; i < values.rows; ++i) {
    for (std::size_t j = 0; j < f; ++j) out.values(i, j) = values(i, j);
    const DateTime& ts = timestamps[i];
    const double hour_angle = kTau * ts.fractional_hour() / 24.0;
    out.values(i, f) = std::sin(hour_angle);
    out.values(i, f + 1) = std::cos(hour_angle);
    double second_angle;
    if (mode == CalendarMode::Ett) {
      second_angle = kTau * static_cast<double>(ts.day_of_year()) / 365.0;
    } else {
      second_angle = kTau * static_cast<double>(ts.day_of_week()) / 7.0;
    }
    out.values(i, f + 2) = std::sin(second_angle);
    out.values(i, f + 3) = std::cos(second_angle);
  }
  return out;
}

std::vector<WindowSample> make_windows(const Matrix& values, IndexRange range,
                                       std::size_t window, std::size_t horizon,
                                       std::size_t target_cols) {
  if (range.end > values.rows || range.begin > range.end) {
    throw std::invalid_argument("make_windows: range outside matrix");
  }
  if (target_cols == 0 || target_cols > values.cols) {
    throw std::invalid_argument("make_windows: bad target column count");
  }
  const std::size_t len = range.size();
  if (len < window + horizon) {
    throw std::invalid_argument("make_windows: range length " +
                                std::to_string(len) + " below minimum " +
                                std::to_string(window + horizon));
  }
  const std::size_t count = len - window - horizon + 1;
  std::vector<WindowSample> samples;
  samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t start = range.begin + s;
    WindowSample ws;
    ws.x = Matrix(window, values.cols);
    for (std::size_t t = 0; t < window; ++t) {
      for (std::size_t j = 0; j < values.cols; ++j) {
        ws.x(t, j) = values(start + t, j);
      }
    }
    ws.y = Matrix(horizon, target_cols);
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t j = 0; j < target_cols; ++j) {
        ws.y(t, j) = values(start + window + t, j);
      }
    }
    ws.x_last.resize(target_cols);
    for (std::size_t j = 0; j < target_cols; ++j) {
      ws.x_last[j] = ws.x(window - 1, j);
    }
    samples.push_back(std::move(ws));
  }
  return samples;
}

Dataset prepare_dataset(const RawSeries& series, const RunConfig& cfg) {
  Dataset ds;
  ds.columns = series.columns;
  ds.f_raw = series.values.cols;
  ds.splits = chronological_split(series.rows(), cfg.train.window,
                                  cfg.train.horizon);
  ds.normalizer = fit_normalizer(series.values, ds.splits.train, ds.columns);
  Matrix normalized = ds.normalizer.apply(series.values);
  AugmentedMatrix aug =
      add_calendar_features(normalized, series.timestamps, cfg.calendar_mode);
  ds.features = std::move(aug.values);
  ds.calendar_indices = std::move(aug.calendar_indices);
  ds.f_in = ds.features.cols;
  ds.f_out = cfg.predict_calendar ? ds.f_in : ds.f_raw;
  ds.train = make_windows(ds.features, ds.splits.train, cfg.train.window,
                          cfg.train.horizon, ds.f_out);
  ds.val = make_windows(ds.features, ds.splits.val, cfg.train.window,
                        cfg.train.horizon, ds.f_out);
  ds.test = make_windows(ds.features, ds.splits.test, cfg.train.window,
                         cfg.train.horizon, ds.f_out);
  return ds;
}

Dataset load_and_prepare(const RunConfig& cfg) {
  if (cfg.data_path.empty()) {
    throw std::invalid_argument("data_path is required");
  }
  return prepare_dataset(load_csv(cfg.data_path, cfg.datetime_format), cfg);
}

}  // namespace qssm

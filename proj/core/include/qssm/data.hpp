#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qssm/config.hpp"
#include "qssm/tensor.hpp"

namespace qssm {

struct DateTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;

  std::int64_t epoch_seconds() const;
  double fractional_hour() const;
  int day_of_year() const;  // 1-based
  int day_of_week() const;  // 0 = Monday
};

bool is_leap_year(int year);
std::int64_t days_from_civil(int year, int month, int day);
DateTime datetime_from_epoch(std::int64_t seconds);

// Strict parser for a strptime subset: %Y %m %d %H %M %S %% plus
// literal characters. The whole string must be consumed.
DateTime parse_datetime(const std::string& text, const std::string& format);

struct RawSeries {
  std::vector<DateTime> timestamps;
  Matrix values;  // N x F_raw
  std::vector<std::string> columns;

  std::size_t rows() const { return values.rows; }
};

// CSV with a header row; first column is the datetime, the rest parse
// as doubles. Timestamps must be strictly increasing with the spacing
// inferred from the first two rows.
RawSeries load_csv(const std::string& path, const std::string& datetime_format);
RawSeries parse_csv(const std::string& text, const std::string& datetime_format,
                    const std::string& source_name);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct SplitRanges {
  IndexRange train, val, test;
};

// 60/20/20 chronological split with boundaries at floor(0.6N) and
// floor(0.8N); every split must fit at least one window+horizon.
SplitRanges chronological_split(std::size_t n, std::size_t window,
                                std::size_t horizon);

struct Normalizer {
  Vector mean;
  Vector stddev;  // population

  Matrix apply(const Matrix& values) const;
  Matrix invert(const Matrix& values) const;
};

Normalizer fit_normalizer(const Matrix& values, IndexRange train_range,
                          const std::vector<std::string>& columns);

struct AugmentedMatrix {
  Matrix values;
  std::vector<std::size_t> calendar_indices;
};

AugmentedMatrix add_calendar_features(const Matrix& values,
                                      const std::vector<DateTime>& timestamps,
                                      CalendarMode mode);

struct WindowSample {
  Matrix x;       // window x F_in
  Matrix y;       // horizon x F_out
  Vector x_last;  // last row of x restricted to the first F_out columns
};

// Stride-1 windows fully inside [range.begin, range.end); targets are
// the first target_cols columns of the matrix.
std::vector<WindowSample> make_windows(const Matrix& values, IndexRange range,
                                       std::size_t window, std::size_t horizon,
                                       std::size_t target_cols);

struct Dataset {
  std::vector<std::string> columns;
  Normalizer normalizer;
  SplitRanges splits;
  Matrix features;  // N x F_in: normalized raw columns + calendar columns
  std::vector<std::size_t> calendar_indices;
  std::size_t f_raw = 0;
  std::size_t f_in = 0;
  std::size_t f_out = 0;
  std::vector<WindowSample> train;
  std::vector<WindowSample> val;
  std::vector<WindowSample> test;
};

Dataset prepare_dataset(const RawSeries& series, const RunConfig& cfg);
Dataset load_and_prepare(const RunConfig& cfg);

}  // namespace qssm

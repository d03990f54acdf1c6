#pragma once

#include <cstdint>
#include <string>

#include "qssm/data.hpp"

namespace qssm {

struct SineSpec {
  std::size_t length = 2000;
  double period = 48.0;  // steps per full cycle
  double amplitude = 1.0;
  double noise_std = 0.0;
  std::uint64_t seed = 7;
  DateTime start{2016, 1, 1, 0, 0, 0};
  int step_seconds = 3600;
};

RawSeries make_sine_series(const SineSpec& spec);
std::string sine_csv(const SineSpec& spec);
void write_sine_csv(const std::string& path, const SineSpec& spec);

}  // namespace qssm

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qssm {

struct ScalePoint {
  std::size_t size = 0;
  double seconds = 0.0;  // median per-iteration wall time
};

struct ScalingReport {
  std::vector<ScalePoint> window_sweep;   // recurrence forward+backward
  std::vector<ScalePoint> horizon_sweep;  // decoder forward+backward
  std::vector<ScalePoint> latent_sweep;   // recurrence at 4x latent width
  std::vector<double> window_ratios;      // successive timing ratios
  std::vector<double> horizon_ratios;
  double latent_ratio4 = 0.0;  // time(4d) / time(d), proj width fixed
  double window_exponent = 0.0;  // log-log least-squares slope
  double horizon_exponent = 0.0;
  double checksum = 0.0;  // folds every computed output into the report
};

// Times the window sweep {64,128,256,512} through encode+encode_backward,
// the horizon sweep {24,48,96,192} through decode+decode_backward, and the
// latent sweep {32,128} through the recurrence, with the other dimensions
// fixed in each sweep.
ScalingReport run_scaling_bench(std::uint64_t seed, int repeats = 7);

std::string scaling_csv(const ScalingReport& report);
std::string scaling_text(const ScalingReport& report);

}  // namespace qssm

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "qssm/config.hpp"

namespace qssm::cli {

// Errors that should surface as exit code 2 (bad invocation) rather
// than 1 (failed check or data problem).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalOptions {
  std::string checkpoint;
  std::string split = "test";
};

struct ForecastOptions {
  std::string checkpoint;
  std::string split = "test";
  std::size_t index = 0;
  std::string output;  // empty: stdout
};

struct GradcheckOptions {
  std::uint64_t seed = 42;
  GateKind gate = GateKind::Quantum;
  double dropout_p = 0.0;
};

struct BenchOptions {
  std::uint64_t seed = 42;
  int repeats = 7;
};

struct AblateOptions {
  bool per_step = false;
};

int cmd_train(RunConfig cfg, std::ostream& out);
int cmd_eval(RunConfig cfg, const EvalOptions& opt, std::ostream& out);
int cmd_forecast(RunConfig cfg, const ForecastOptions& opt, std::ostream& out);
int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out);
int cmd_bench(RunConfig cfg, const BenchOptions& opt, std::ostream& out);
int cmd_ablate(RunConfig cfg, const AblateOptions& opt, std::ostream& out);

std::string dataset_id(const std::string& data_path);

}  // namespace qssm::cli

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qssm {

enum class GateKind { Quantum, Classical, ClassicalPerStep };
enum class CalendarMode { None, Ett, Traffic };

std::string to_string(GateKind kind);
GateKind gate_kind_from(std::string_view s);
std::string to_string(CalendarMode mode);
CalendarMode calendar_mode_from(std::string_view s);

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double scheduler_factor = 0.5;
  int scheduler_patience = 3;
  int early_stop_patience = 10;
  int max_epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  std::size_t window = 96;
  std::size_t horizon = 96;
  std::size_t proj_width = 128;
  std::size_t latent_width = 128;
  double dropout_p = 0.1;
  double g_min = 0.05;
  double g_max = 0.95;

  bool operator==(const TrainConfig&) const = default;
};

struct RunConfig {
  TrainConfig train;
  std::string data_path;
  std::string datetime_format = "%Y-%m-%d %H:%M:%S";
  CalendarMode calendar_mode = CalendarMode::None;
  bool predict_calendar = false;
  GateKind gate = GateKind::Quantum;
  std::string out_dir;

  bool operator==(const RunConfig&) const = default;
};

void validate(const TrainConfig& cfg);

// Flat key=value text, one field per line, fixed order. parse_config
// rejects unknown keys and malformed values.
std::string emit_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);

// Hash of the fields that fix model shape and data handling (dims,
// dropout, gate clamp, seed, dataset/calendar settings). Gate kind and
// optimizer hyperparameters are excluded so ablation runs and resumed
// evals of the same architecture compare equal.
std::string config_hash(const RunConfig& cfg);

std::string default_out_dir();

}  // namespace qssm

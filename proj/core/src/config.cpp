#include "qssm/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace qssm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Quantum: return "quantum";
    case GateKind::Classical: return "classical";
    case GateKind::ClassicalPerStep: return "classical-per-step";
  }
  throw std::invalid_argument("gate kind: bad enum value");
}

GateKind gate_kind_from(std::string_view s) {
  if (s == "quantum") return GateKind::Quantum;
  if (s == "classical") return GateKind::Classical;
  if (s == "classical-per-step") return GateKind::ClassicalPerStep;
  throw std::invalid_argument("gate kind: expected quantum, classical, or classical-per-step, got " +
                              std::string(s));
}

std::string to_string(CalendarMode mode) {
  switch (mode) {
    case CalendarMode::None: return "none";
    case CalendarMode::Ett: return "ett";
    case CalendarMode::Traffic: return "traffic";
  }
  throw std::invalid_argument("calendar mode: bad enum value");
}

CalendarMode calendar_mode_from(std::string_view s) {
  if (s == "none") return CalendarMode::None;
  if (s == "ett") return CalendarMode::Ett;
  if (s == "traffic") return CalendarMode::Traffic;
  throw std::invalid_argument("calendar mode: expected none, ett, or traffic, got " +
                              std::string(s));
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("config: learning_rate must be positive");
  }
  if (cfg.weight_decay < 0.0) {
    throw std::invalid_argument("config: weight_decay must be non-negative");
  }
  if (!(cfg.scheduler_factor > 0.0 && cfg.scheduler_factor < 1.0)) {
    throw std::invalid_argument("config: scheduler_factor must be in (0, 1)");
  }
  if (cfg.scheduler_patience < 0 || cfg.early_stop_patience < 0) {
    throw std::invalid_argument("config: patience values must be non-negative");
  }
  if (cfg.max_epochs <= 0) {
    throw std::invalid_argument("config: max_epochs must be positive");
  }
  if (cfg.batch_size == 0 || cfg.window == 0 || cfg.horizon == 0 ||
      cfg.proj_width == 0 || cfg.latent_width == 0) {
    throw std::invalid_argument("config: sizes must be positive");
  }
  if (cfg.dropout_p < 0.0 || cfg.dropout_p >= 1.0) {
    throw std::invalid_argument("config: dropout_p must be in [0, 1)");
  }
  if (!(0.0 < cfg.g_min && cfg.g_min < cfg.g_max && cfg.g_max < 1.0)) {
    throw std::invalid_argument("config: need 0 < g_min < g_max < 1");
  }
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "learning_rate=" << format_double(cfg.train.learning_rate) << '\n'
      << "weight_decay=" << format_double(cfg.train.weight_decay) << '\n'
      << "scheduler_factor=" << format_double(cfg.train.scheduler_factor) << '\n'
      << "scheduler_patience=" << cfg.train.scheduler_patience << '\n'
      << "early_stop_patience=" << cfg.train.early_stop_patience << '\n'
      << "max_epochs=" << cfg.train.max_epochs << '\n'
      << "batch_size=" << cfg.train.batch_size << '\n'
      << "seed=" << cfg.train.seed << '\n'
      << "window=" << cfg.train.window << '\n'
      << "horizon=" << cfg.train.horizon << '\n'
      << "proj_width=" << cfg.train.proj_width << '\n'
      << "latent_width=" << cfg.train.latent_width << '\n'
      << "dropout_p=" << format_double(cfg.train.dropout_p) << '\n'
      << "g_min=" << format_double(cfg.train.g_min) << '\n'
      << "g_max=" << format_double(cfg.train.g_max) << '\n'
      << "data_path=" << cfg.data_path << '\n'
      << "datetime_format=" << cfg.datetime_format << '\n'
      << "calendar_mode=" << to_string(cfg.calendar_mode) << '\n'
      << "predict_calendar=" << (cfg.predict_calendar ? "true" : "false") << '\n'
      << "gate=" << to_string(cfg.gate) << '\n'
      << "out_dir=" << cfg.out_dir << '\n';
  return out.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key=value, got: " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));
    if (key == "learning_rate") cfg.train.learning_rate = parse_double(key, val);
    else if (key == "weight_decay") cfg.train.weight_decay = parse_double(key, val);
    else if (key == "scheduler_factor") cfg.train.scheduler_factor = parse_double(key, val);
    else if (key == "scheduler_patience") cfg.train.scheduler_patience = parse_int(key, val);
    else if (key == "early_stop_patience") cfg.train.early_stop_patience = parse_int(key, val);
    else if (key == "max_epochs") cfg.train.max_epochs = parse_int(key, val);
    else if (key == "batch_size") cfg.train.batch_size = parse_u64(key, val);
    else if (key == "seed") cfg.train.seed = parse_u64(key, val);
    else if (key == "window") cfg.train.window = parse_u64(key, val);
    else if (key == "horizon") cfg.train.horizon = parse_u64(key, val);
    else if (key == "proj_width") cfg.train.proj_width = parse_u64(key, val);
    else if (key == "latent_width") cfg.train.latent_width = parse_u64(key, val);
    else if (key == "dropout_p") cfg.train.dropout_p = parse_double(key, val);
    else if (key == "g_min") cfg.train.g_min = parse_double(key, val);
    else if (key == "g_max") cfg.train.g_max = parse_double(key, val);
    else if (key == "data_path") cfg.data_path = val;
    else if (key == "datetime_format") cfg.datetime_format = val;
    else if (key == "calendar_mode") cfg.calendar_mode = calendar_mode_from(val);
    else if (key == "predict_calendar") cfg.predict_calendar = parse_bool(key, val);
    else if (key == "gate") cfg.gate = gate_kind_from(val);
    else if (key == "out_dir") cfg.out_dir = val;
    else throw std::invalid_argument("config: unknown key " + key);
  }
  return cfg;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  std::ostringstream key;
  key << cfg.data_path << '|' << cfg.datetime_format << '|'
      << to_string(cfg.calendar_mode) << '|' << cfg.predict_calendar << '|'
      << cfg.train.window << '|' << cfg.train.horizon << '|'
      << cfg.train.proj_width << '|' << cfg.train.latent_width << '|'
      << format_double(cfg.train.dropout_p) << '|'
      << format_double(cfg.train.g_min) << '|'
      << format_double(cfg.train.g_max) << '|' << cfg.train.seed;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(key.str())));
  return buf;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("QSSM_OUT_DIR"); env && *env) return env;
  return "qssm_out";
}

}  // namespace qssm

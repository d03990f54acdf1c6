#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using qssm::RunConfig;

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> data, datetime_format, calendar, gate, out_dir;
  std::optional<double> learning_rate, weight_decay, scheduler_factor,
      dropout, g_min, g_max;
  std::optional<int> scheduler_patience, early_stop_patience, max_epochs;
  std::optional<std::uint64_t> batch_size, seed, window, horizon, proj_width,
      latent_width;
  bool predict_calendar = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path,
                  "key=value config file; command-line flags override it");
  sub->add_option("--data", o.data, "input CSV (first column datetime)");
  sub->add_option("--datetime-format", o.datetime_format,
                  "strptime-style timestamp format");
  sub->add_option("--calendar", o.calendar, "calendar feature set")
      ->check(CLI::IsMember({"none", "ett", "traffic"}));
  sub->add_option("--gate", o.gate, "gate variant")
      ->check(CLI::IsMember({"quantum", "classical", "classical-per-step"}));
  sub->add_option("--out-dir", o.out_dir,
                  "output directory (default $QSSM_OUT_DIR or ./qssm_out)");
  sub->add_option("--learning-rate", o.learning_rate, "initial Adam step size");
  sub->add_option("--weight-decay", o.weight_decay,
                  "decoupled decay on weight matrices");
  sub->add_option("--scheduler-factor", o.scheduler_factor,
                  "lr multiplier on plateau");
  sub->add_option("--scheduler-patience", o.scheduler_patience,
                  "plateau epochs before reducing lr");
  sub->add_option("--early-stop-patience", o.early_stop_patience,
                  "non-improving epochs before stopping");
  sub->add_option("--max-epochs", o.max_epochs, "epoch cap");
  sub->add_option("--batch-size", o.batch_size, "windows per optimizer step");
  sub->add_option("--seed", o.seed, "master random seed");
  sub->add_option("--window", o.window, "lookback length");
  sub->add_option("--horizon", o.horizon, "forecast length");
  sub->add_option("--proj-width", o.proj_width, "input projection width");
  sub->add_option("--latent-width", o.latent_width, "hidden state width");
  sub->add_option("--dropout", o.dropout, "decoder dropout probability");
  sub->add_option("--g-min", o.g_min, "gate clamp lower bound");
  sub->add_option("--g-max", o.g_max, "gate clamp upper bound");
  sub->add_flag("--predict-calendar", o.predict_calendar,
                "forecast calendar columns too");
}

RunConfig build_config(const CommonOptions& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) {
      throw std::runtime_error("cannot open config file " + o.config_path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg = qssm::parse_config(buf.str());
  }
  if (o.data) cfg.data_path = *o.data;
  if (o.datetime_format) cfg.datetime_format = *o.datetime_format;
  if (o.calendar) cfg.calendar_mode = qssm::calendar_mode_from(*o.calendar);
  if (o.gate) cfg.gate = qssm::gate_kind_from(*o.gate);
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.weight_decay) cfg.train.weight_decay = *o.weight_decay;
  if (o.scheduler_factor) cfg.train.scheduler_factor = *o.scheduler_factor;
  if (o.scheduler_patience) cfg.train.scheduler_patience = *o.scheduler_patience;
  if (o.early_stop_patience)
    cfg.train.early_stop_patience = *o.early_stop_patience;
  if (o.max_epochs) cfg.train.max_epochs = *o.max_epochs;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.window) cfg.train.window = *o.window;
  if (o.horizon) cfg.train.horizon = *o.horizon;
  if (o.proj_width) cfg.train.proj_width = *o.proj_width;
  if (o.latent_width) cfg.train.latent_width = *o.latent_width;
  if (o.dropout) cfg.train.dropout_p = *o.dropout;
  if (o.g_min) cfg.train.g_min = *o.g_min;
  if (o.g_max) cfg.train.g_max = *o.g_max;
  if (o.predict_calendar) cfg.predict_calendar = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-gated state-space time-series forecaster"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts_c, forecast_opts_c, bench_opts_c,
      ablate_opts_c;
  qssm::cli::EvalOptions eval_opts;
  qssm::cli::ForecastOptions forecast_opts;
  qssm::cli::GradcheckOptions gradcheck_opts;
  qssm::cli::BenchOptions bench_opts;
  qssm::cli::AblateOptions ablate_opts;
  std::string gradcheck_gate = "quantum";

  CLI::App* train = app.add_subcommand("train", "fit a model and report on the test split");
  add_common(train, train_opts);

  CLI::App* eval = app.add_subcommand("eval", "score a saved checkpoint on one split");
  add_common(eval, eval_opts_c);
  eval->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint file from train");
  eval->add_option("--split", eval_opts.split, "train, val, or test")
      ->check(CLI::IsMember({"train", "val", "test"}));

  CLI::App* forecast = app.add_subcommand("forecast", "emit one window's forecast as CSV");
  add_common(forecast, forecast_opts_c);
  forecast->add_option("--checkpoint", forecast_opts.checkpoint, "checkpoint file from train");
  forecast->add_option("--split", forecast_opts.split, "train, val, or test")
      ->check(CLI::IsMember({"train", "val", "test"}));
  forecast->add_option("--index", forecast_opts.index, "window index within the split");
  forecast->add_option("--output", forecast_opts.output, "CSV path (default stdout)");

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "cross-check analytic, finite-difference, and parameter-shift derivatives");
  gradcheck->add_option("--seed", gradcheck_opts.seed, "random seed for the tiny model");
  gradcheck->add_option("--gate", gradcheck_gate, "gate variant")
      ->check(CLI::IsMember({"quantum", "classical", "classical-per-step"}));
  gradcheck->add_option("--dropout", gradcheck_opts.dropout_p,
                        "must stay 0; present so the refusal is explicit");

  CLI::App* bench = app.add_subcommand("bench", "time the window and horizon sweeps");
  add_common(bench, bench_opts_c);
  bench->add_option("--bench-seed", bench_opts.seed, "seed for benchmark inputs");
  bench->add_option("--repeats", bench_opts.repeats, "timing repetitions per point");

  CLI::App* ablate = app.add_subcommand(
      "ablate", "train quantum and classical gates with one seed, side by side");
  add_common(ablate, ablate_opts_c);
  ablate->add_flag("--per-step", ablate_opts.per_step,
                   "use the per-step classical gate variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return qssm::cli::cmd_train(build_config(train_opts), std::cout);
    if (*eval) return qssm::cli::cmd_eval(build_config(eval_opts_c), eval_opts, std::cout);
    if (*forecast) {
      return qssm::cli::cmd_forecast(build_config(forecast_opts_c), forecast_opts, std::cout);
    }
    if (*gradcheck) {
      gradcheck_opts.gate = qssm::gate_kind_from(gradcheck_gate);
      return qssm::cli::cmd_gradcheck(gradcheck_opts, std::cout);
    }
    if (*bench) return qssm::cli::cmd_bench(build_config(bench_opts_c), bench_opts, std::cout);
    if (*ablate) return qssm::cli::cmd_ablate(build_config(ablate_opts_c), ablate_opts, std::cout);
  } catch (const qssm::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

#include "qssm/checkpoint.hpp"
#include "qssm/data.hpp"
#include "qssm/eval.hpp"
#include "qssm/gradcheck.hpp"
#include "qssm/model.hpp"
#include "qssm/scaling.hpp"
#include "qssm/trainer.hpp"

namespace qssm::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("short write to " + path.string());
  }
}

fs::path resolve_out_dir(RunConfig& cfg) {
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void require_data_path(const RunConfig& cfg) {
  if (cfg.data_path.empty()) {
    throw UsageError(
        "missing dataset path: pass --data <csv> (or set data_path in the --config file)");
  }
}

const std::vector<WindowSample>& pick_split(const Dataset& ds,
                                            const std::string& split) {
  if (split == "train") return ds.train;
  if (split == "val") return ds.val;
  if (split == "test") return ds.test;
  throw UsageError("unknown split '" + split + "' (expected train, val, or test)");
}

// Rebuilds the dataset and model for a saved checkpoint, refusing any
// configuration that no longer matches what was trained.
struct RestoredModel {
  Dataset dataset;
  std::unique_ptr<ModelBundle> bundle;
};

RestoredModel restore_model(const RunConfig& cfg, const std::string& ckpt_path) {
  const CheckpointData ckpt = load_checkpoint(ckpt_path);
  if (ckpt.kind != cfg.gate) {
    throw std::runtime_error("checkpoint was trained with gate=" +
                             to_string(ckpt.kind) + "; pass --gate " +
                             to_string(ckpt.kind));
  }
  const std::string hash = config_hash(cfg);
  if (hash != ckpt.config_hash) {
    throw std::runtime_error(
        "config hash " + hash + " does not match checkpoint hash " +
        ckpt.config_hash +
        "; the window/horizon/width, dataset, calendar, or seed settings differ "
        "from the training run");
  }
  RestoredModel restored;
  restored.dataset = load_and_prepare(cfg);
  const ModelDims dims = dims_from(cfg, restored.dataset);
  if (dims.f_in != ckpt.dims.f_in || dims.f_out != ckpt.dims.f_out ||
      dims.window != ckpt.dims.window || dims.horizon != ckpt.dims.horizon ||
      dims.proj_width != ckpt.dims.proj_width ||
      dims.latent_width != ckpt.dims.latent_width) {
    throw std::runtime_error("checkpoint dimensions do not match the prepared dataset");
  }
  restored.bundle = make_bundle(
      dims, cfg.gate, cfg.train.dropout_p, cfg.train.g_min, cfg.train.g_max,
      std::vector<std::size_t>(restored.dataset.calendar_indices.begin(),
                               restored.dataset.calendar_indices.end()));
  apply_checkpoint(ckpt, *restored.bundle);
  return restored;
}

std::vector<std::string> target_names(const Dataset& ds, const RunConfig& cfg) {
  std::vector<std::string> names = ds.columns;
  if (cfg.predict_calendar && !ds.calendar_indices.empty()) {
    names.push_back("hour_sin");
    names.push_back("hour_cos");
    if (cfg.calendar_mode == CalendarMode::Ett) {
      names.push_back("doy_sin");
      names.push_back("doy_cos");
    } else {
      names.push_back("dow_sin");
      names.push_back("dow_cos");
    }
  }
  names.resize(ds.f_out);
  return names;
}

}  // namespace

std::string dataset_id(const std::string& data_path) {
  const fs::path p(data_path);
  std::string stem = p.stem().string();
  return stem.empty() ? "dataset" : stem;
}

int cmd_train(RunConfig cfg, std::ostream& out) {
  require_data_path(cfg);
  validate(cfg.train);
  const fs::path dir = resolve_out_dir(cfg);
  write_file(dir / "config.txt", emit_config(cfg));

  const Dataset ds = load_and_prepare(cfg);
  out << "dataset " << dataset_id(cfg.data_path) << ": " << ds.f_raw
      << " raw columns, " << ds.f_in << " inputs, " << ds.train.size()
      << "/" << ds.val.size() << "/" << ds.test.size()
      << " train/val/test windows\n";

  TrainResult result = train(cfg, ds);
  write_file(dir / "epoch_log.csv", epoch_log_csv(result.log));
  save_checkpoint((dir / "model.ckpt").string(), result.bundle->model,
                  result.bundle->store, config_hash(cfg));

  ForecastReport report = evaluate(result.bundle->model, ds.test,
                                   dataset_id(cfg.data_path), "test", cfg);
  write_file(dir / "report_test.json", report_json(report));
  write_file(dir / "report_test.csv",
             report_csv_header() + report_csv_row(report));

  out << "trained " << result.state.epoch << " epochs ("
      << result.log.size() << " logged), best val mse "
      << format_double(result.state.best_val) << " at epoch "
      << result.state.best_epoch << "\n";
  out << "test mse " << format_double(report.mse) << ", test mae "
      << format_double(report.mae) << "\n";
  out << "wrote " << (dir / "epoch_log.csv").string() << ", "
      << (dir / "model.ckpt").string() << ", "
      << (dir / "report_test.json").string() << "\n";
  return 0;
}

int cmd_eval(RunConfig cfg, const EvalOptions& opt, std::ostream& out) {
  require_data_path(cfg);
  if (opt.checkpoint.empty()) {
    throw UsageError("missing checkpoint path: pass --checkpoint <file>");
  }
  validate(cfg.train);
  const fs::path dir = resolve_out_dir(cfg);
  RestoredModel restored = restore_model(cfg, opt.checkpoint);
  const auto& samples = pick_split(restored.dataset, opt.split);
  ForecastReport report = evaluate(restored.bundle->model, samples,
                                   dataset_id(cfg.data_path), opt.split, cfg);
  const std::string json = report_json(report);
  write_file(dir / ("report_" + opt.split + ".json"), json);
  write_file(dir / ("report_" + opt.split + ".csv"),
             report_csv_header() + report_csv_row(report));
  out << json;
  return 0;
}

int cmd_forecast(RunConfig cfg, const ForecastOptions& opt, std::ostream& out) {
  require_data_path(cfg);
  if (opt.checkpoint.empty()) {
    throw UsageError("missing checkpoint path: pass --checkpoint <file>");
  }
  validate(cfg.train);
  RestoredModel restored = restore_model(cfg, opt.checkpoint);
  const auto& samples = pick_split(restored.dataset, opt.split);
  if (opt.index >= samples.size()) {
    throw std::runtime_error("window index " + std::to_string(opt.index) +
                             " out of range; split " + opt.split + " has " +
                             std::to_string(samples.size()) + " windows");
  }
  const Forecast forecast = restored.bundle->model.predict(samples[opt.index]);

  std::ostringstream csv;
  csv << "step";
  for (const std::string& name : target_names(restored.dataset, cfg)) {
    csv << ',' << name;
  }
  csv << '\n';
  for (std::size_t t = 0; t < forecast.values.rows; ++t) {
    csv << (t + 1);
    for (std::size_t j = 0; j < forecast.values.cols; ++j) {
      csv << ',' << format_double(forecast.values(t, j));
    }
    csv << '\n';
  }
  if (opt.output.empty()) {
    out << csv.str();
  } else {
    write_file(opt.output, csv.str());
    out << "wrote " << opt.output << "\n";
  }
  return 0;
}

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out) {
  if (opt.dropout_p != 0.0) {
    throw UsageError("gradcheck requires a deterministic forward pass; remove --dropout");
  }
  const GradCheckReport report = run_gradcheck(opt.seed, opt.gate);
  out << gradcheck_text(report);
  return report.passed ? 0 : 1;
}

int cmd_bench(RunConfig cfg, const BenchOptions& opt, std::ostream& out) {
  if (opt.repeats < 1) {
    throw UsageError("--repeats must be at least 1");
  }
  const fs::path dir = resolve_out_dir(cfg);
  const ScalingReport report = run_scaling_bench(opt.seed, opt.repeats);
  write_file(dir / "scaling.csv", scaling_csv(report));
  out << scaling_text(report);
  out << "wrote " << (dir / "scaling.csv").string() << "\n";
  return 0;
}

int cmd_ablate(RunConfig cfg, const AblateOptions& opt, std::ostream& out) {
  require_data_path(cfg);
  validate(cfg.train);
  const fs::path dir = resolve_out_dir(cfg);
  const Dataset ds = load_and_prepare(cfg);

  const GateKind kinds[2] = {
      GateKind::Quantum,
      opt.per_step ? GateKind::ClassicalPerStep : GateKind::Classical};
  std::string table = "gate," + report_csv_header();
  for (GateKind kind : kinds) {
    RunConfig run_cfg = cfg;
    run_cfg.gate = kind;
    TrainResult result = train(run_cfg, ds);
    const std::string tag = to_string(kind);
    write_file(dir / ("ablate_" + tag + "_log.csv"), epoch_log_csv(result.log));
    ForecastReport report = evaluate(result.bundle->model, ds.test,
                                     dataset_id(cfg.data_path), "test", run_cfg);
    if (!std::isfinite(report.mse) || !std::isfinite(report.mae)) {
      out << "gate=" << tag << " diverged (non-finite test metrics)\n";
      return 1;
    }
    table += tag + "," + report_csv_row(report);
    out << "gate=" << tag << ": test mse " << format_double(report.mse)
        << ", mae " << format_double(report.mae) << ", best val "
        << format_double(result.state.best_val) << "\n";
  }
  write_file(dir / "ablate_report.csv", table);
  out << "wrote " << (dir / "ablate_report.csv").string() << "\n";
  return 0;
}

}  // namespace qssm::cli

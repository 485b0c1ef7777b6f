#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "reglab/config.hpp"
#include "reglab/dataset_io.hpp"
#include "reglab/report.hpp"
#include "reglab/tasks.hpp"
#include "reglab/verify.hpp"

namespace {

using namespace reglab;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  unsigned jobs = 1;
  std::size_t count = 0;  // augment sample count, 0 = train-split size
  bool verbose = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct ResolvedTask {
  Dataset data;
  std::optional<Decoder> decoder;
};

ResolvedTask resolve_task(const ExperimentConfig& config) {
  ResolvedTask task;
  if (!config.task_builtin.empty()) {
    if (config.task_builtin == "hier-z4x16-v1") {
      auto hier = tasks::hier_z4x16_v1(config.train.seed);
      task.data = std::move(hier.data);
      task.decoder = std::move(hier.decoder);
    } else {
      task.data = tasks::make_builtin(config.task_builtin, config.train.seed);
    }
  } else {
    task.data = load_dataset_csv(config.task_dataset);
    task.data.validate();
  }
  return task;
}

void collect_notes(const ExperimentConfig& config, RunReport& report) {
  if (!config.augment.has_value()) return;
  const NoiseSpec noise{config.augment->mode, config.augment->dist};
  for (const auto& warning : noise.validate()) {
    report.notes.push_back(warning);
  }
}

RunReport run_training(const ExperimentConfig& config, const std::string& subcommand,
                       bool verbose) {
  const ResolvedTask task = resolve_task(config);
  const TrainConfig train_config = to_train_config(config, task.decoder);

  RunReport report;
  report.subcommand = subcommand;
  report.config = config;
  collect_notes(config, report);

  const TrainResult result = train(train_config, task.data);
  report.trajectory = result.trajectory;
  if (verbose) {
    for (std::size_t e = 0; e < result.trajectory.size(); ++e) {
      std::cerr << "epoch " << e << " loss " << result.trajectory[e] << "\n";
    }
  }

  if (!task.data.val_indices().empty()) {
    GapRecord record;
    record.report = gap_estimate(result.params, task.data, config.loss);
    record.seed = config.train.seed;
    record.label = "validation";
    report.gaps.push_back(std::move(record));
  }
  if (task.data.has_domain_rows()) {
    GapRecord record;
    record.report = gap_exact(result.params, task.data, config.loss);
    record.seed = config.train.seed;
    record.label = "exact";
    report.gaps.push_back(std::move(record));
  }
  return report;
}

RunReport run_gap(const ExperimentConfig& config, bool verbose) {
  const ResolvedTask task = resolve_task(config);
  if (task.data.val_indices().empty() && !task.data.has_domain_rows()) {
    throw std::invalid_argument(
        "gap: dataset has neither a val split nor domain rows; tag rows with a "
        "`split` column");
  }
  RunReport report = run_training(config, "gap", verbose);
  report.trajectory.clear();  // gap reports only
  return report;
}

RunReport run_verify(const ExperimentConfig& config) {
  std::vector<std::string> selected = config.verify;
  if (selected.empty()) selected = verification_names();
  for (const auto& name : selected) {
    if (!is_verification(name)) {
      throw ConfigError({"verify: unknown verification '" + name + "'"});
    }
  }

  RunReport report;
  report.subcommand = "verify";
  report.config = config;
  report.config.verify = selected;
  for (const auto& name : selected) {
    for (auto& eq : run_verification(name, config.train.seed)) {
      report.equivalences.push_back(std::move(eq));
    }
  }
  return report;
}

std::string run_augment(const ExperimentConfig& config, std::size_t count) {
  if (!config.augment.has_value()) {
    throw ConfigError({"augment: config has no augment section"});
  }
  const ResolvedTask task = resolve_task(config);
  const TrainConfig train_config = to_train_config(config, task.decoder);

  const NoiseSpec noise{config.augment->mode, config.augment->dist};
  for (const auto& warning : noise.validate()) {
    std::cerr << "warning: " << warning << "\n";
  }

  const std::size_t n = count > 0 ? count : task.data.train_indices().size();
  RandomStream stream = RandomStream(config.train.seed).split("augment-cli");
  const auto samples =
      generate_batch(task.data, train_config.augmentation->spec, n, stream);
  return format_augmented_csv(task.data, samples);
}

RunReport run_sweep(const ExperimentConfig& config, unsigned jobs, bool verbose) {
  if (!config.sweep.has_value()) {
    throw ConfigError({"sweep: config has no sweep section"});
  }
  const SweepSection& sweep = *config.sweep;
  if (!sweep.alpha.empty() && !config.train.penalty.has_value()) {
    throw ConfigError({"sweep.alpha: requires train.penalty"});
  }

  std::vector<ExperimentConfig> combos;
  const std::vector<double> etas =
      sweep.eta.empty() ? std::vector<double>{config.train.eta} : sweep.eta;
  const std::vector<double> alphas =
      sweep.alpha.empty() ? std::vector<double>{0.0} : sweep.alpha;
  for (const std::uint64_t seed : sweep.seeds) {
    for (const double eta : etas) {
      for (const double alpha : alphas) {
        ExperimentConfig child = config;
        child.sweep.reset();
        child.train.seed = seed;
        child.train.eta = eta;
        if (!sweep.alpha.empty()) child.train.penalty->alpha = alpha;
        combos.push_back(std::move(child));
      }
    }
  }

  std::vector<RunReport> children(combos.size());
  std::vector<std::exception_ptr> failures(combos.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= combos.size()) return;
      try {
        children[i] = run_training(combos[i], "train", false);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(std::max(1u, jobs), combos.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  RunReport report;
  report.subcommand = "sweep";
  report.config = config;
  report.runs = std::move(children);
  if (verbose) {
    std::cerr << "sweep: " << report.runs.size() << " runs\n";
  }
  return report;
}

void write_output(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write output file: " + path);
  out << content;
  if (!out) throw IoError("failed writing output file: " + path);
}

int dispatch(const std::string& subcommand, const Options& options) {
  const auto started = std::chrono::steady_clock::now();

  ExperimentConfig config = parse_config(read_file(options.config_path));
  if (options.seed.has_value()) config.train.seed = *options.seed;
  const std::string out_path = !options.out.empty() ? options.out : config.output;
  const ReportFormat format =
      options.format == "csv" ? ReportFormat::csv : ReportFormat::json;

  int exit_code = kExitOk;
  if (subcommand == "augment") {
    write_output(run_augment(config, options.count), out_path);
  } else {
    RunReport report;
    if (subcommand == "train") {
      report = run_training(config, "train", options.verbose);
    } else if (subcommand == "gap") {
      report = run_gap(config, options.verbose);
    } else if (subcommand == "verify") {
      report = run_verify(config);
      if (!all_verifications_pass(report)) exit_code = kExitVerificationFailed;
    } else {
      report = run_sweep(config, options.jobs, options.verbose);
    }
    write_output(emit_report(report, format), out_path);
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  // timing stays on stderr so reports are byte-identical across repeat runs
  std::cerr << "wall_clock_ms=" << elapsed.count() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"training and regularization laboratory for dense networks"};
  app.require_subcommand(1);

  Options options;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--seed", options.seed, "override the config seed");
    cmd->add_option("--out", options.out, "output path (default: config output/stdout)");
    cmd->add_option("--format", options.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--verbose", options.verbose, "line-per-epoch log on stderr");
  };

  CLI::App* train = app.add_subcommand("train", "train a network and report losses/gaps");
  add_common(train);
  CLI::App* gap = app.add_subcommand("gap", "train and report generalization gaps");
  add_common(gap);
  CLI::App* augment = app.add_subcommand("augment", "emit an augmented dataset CSV");
  add_common(augment);
  augment->add_option("--count", options.count, "number of augmented samples");
  CLI::App* verify = app.add_subcommand("verify", "run equivalence verifications");
  add_common(verify);
  CLI::App* sweep = app.add_subcommand("sweep", "cross-product of config overrides");
  add_common(sweep);
  sweep->add_option("--jobs", options.jobs, "concurrent runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    return dispatch(subcommand, options);
  } catch (const ConfigError& e) {
    for (const auto& message : e.errors) std::cerr << "config error: " << message << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const TrainingDiverged& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitVerificationFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  }
}

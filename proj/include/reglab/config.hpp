#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reglab/experiment.hpp"

namespace reglab {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errors_);
  std::vector<std::string> errors;
};

struct DropSection {
  double p = 1.0;
  DropGranularity granularity = DropGranularity::neuron;
  std::size_t layer_index = 0;
  MaskGranularity mask_granularity = MaskGranularity::per_minibatch;
  ScaleMode scale_mode = ScaleMode::retention_p;

  bool operator==(const DropSection&) const = default;
};

struct TrainSection {
  double eta = 0.1;
  std::size_t epochs = 0;
  std::size_t minibatch_size = 1;
  std::uint64_t seed = 0;
  SamplingMode sampling = SamplingMode::shuffle;
  std::optional<PenaltySpec> penalty;
  std::optional<DropSection> drop;

  bool operator==(const TrainSection&) const = default;
};

struct AugmentSection {
  NoiseMode mode = NoiseMode::additive;
  DistSpec dist;
  AugmentTarget target = AugmentTarget::input;
  bool use_task_decoder = false;  // decoder = the builtin task's decoder
  std::optional<Decoder> decoder;
  AugmentPlan::Application application = AugmentPlan::Application::fresh;
  std::size_t copies = 1;

  bool operator==(const AugmentSection&) const = default;
};

struct SweepSection {
  std::vector<std::uint64_t> seeds;
  std::vector<double> eta;
  std::vector<double> alpha;

  bool operator==(const SweepSection&) const = default;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string task_builtin;  // exactly one of task_builtin / task_dataset
  std::string task_dataset;
  std::vector<LayerSpec> network;
  LossKind loss = LossKind::mse;
  TrainSection train;
  std::optional<AugmentSection> augment;
  std::vector<std::string> verify;
  std::optional<SweepSection> sweep;
  std::string output;  // empty = stdout

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict parse: unknown keys are errors and every validation problem is
// reported, each with the path of the offending key.
ExperimentConfig parse_config(const std::string& text);
std::string emit_config(const ExperimentConfig& config);

// Assembles the runtime TrainConfig; the task decoder resolves an augment
// section that asks for it.
TrainConfig to_train_config(const ExperimentConfig& config,
                            const std::optional<Decoder>& task_decoder);

}  // namespace reglab

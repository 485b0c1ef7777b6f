#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reglab/augment.hpp"
#include "reglab/dataset.hpp"
#include "reglab/net.hpp"
#include "reglab/numkit.hpp"
#include "reglab/regularize.hpp"

namespace reglab {

enum class MaskGranularity { per_epoch, per_minibatch };
enum class SamplingMode { shuffle, with_replacement };

struct AugmentPlan {
  enum class Application { fresh, frozen };

  AugmentSpec spec;
  Application application = Application::fresh;
  std::size_t frozen_copies = 1;

  bool operator==(const AugmentPlan&) const = default;
};

struct TrainConfig {
  std::vector<LayerSpec> topology;
  LossKind loss = LossKind::mse;
  double eta = 0.1;
  std::size_t epochs = 0;
  std::size_t minibatch_size = 1;
  std::uint64_t seed = 0;
  std::optional<PenaltySpec> penalty;
  std::optional<DropSpec> drop;
  std::optional<AugmentPlan> augmentation;
  MaskGranularity mask_granularity = MaskGranularity::per_minibatch;
  ScaleMode scale_mode = ScaleMode::retention_p;
  SamplingMode sampling = SamplingMode::shuffle;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainingDiverged : std::runtime_error {
  TrainingDiverged(std::size_t epoch_, double loss_);
  std::size_t epoch;
  double loss_value;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> trajectory;  // mean presented-sample loss per epoch
};

NetworkParams sgd_step(NetworkParams theta, const ParamGradient& grad, double eta);

// Mean per-sample gradient plus the penalty gradient. When a DropSpec is
// given, one mask is sampled from the stream and shared by the whole batch.
ParamGradient minibatch_gradient(const NetworkParams& theta, std::span<const Row> batch,
                                 LossKind kind, const std::optional<PenaltySpec>& penalty,
                                 const std::optional<DropSpec>& drop, RandomStream& stream);

// Core with prepared masks; also reports the mean unpenalized sample loss.
ParamGradient minibatch_gradient_core(const NetworkParams& theta,
                                      std::span<const Row> batch, LossKind kind,
                                      const std::optional<PenaltySpec>& penalty,
                                      const MaskSet& masks, double* mean_loss_out);

MaskSet sample_drop_masks(const NetworkParams& theta, const DropSpec& drop,
                          RandomStream& stream);

TrainResult train(const TrainConfig& config, const Dataset& data);

struct GapReport {
  enum class Estimator { exact, validation };

  double train_loss = 0.0;
  double eval_loss = 0.0;
  double gap = 0.0;  // eval_loss - train_loss
  Estimator estimator = Estimator::exact;

  bool operator==(const GapReport&) const = default;
};

using Predictor = std::function<RealVec(const RealVec&)>;

Predictor network_predictor(const NetworkParams& params);

// Exact gap over an enumerable domain: mean loss over all rows minus mean
// loss over the train split. Requires rows tagged `domain`.
GapReport gap_exact(const Predictor& model, const Dataset& data, LossKind kind);
GapReport gap_exact(const NetworkParams& params, const Dataset& data, LossKind kind);

// Validation-set estimate: mean val loss minus mean train loss.
GapReport gap_estimate(const Predictor& model, const Dataset& data, LossKind kind);
GapReport gap_estimate(const NetworkParams& params, const Dataset& data, LossKind kind);

// Lookup model with zero loss on memorized rows and a fixed fallback
// prediction everywhere else.
class Memorizer {
 public:
  Memorizer(const Dataset& data, RealVec default_prediction);
  RealVec predict(const RealVec& x) const;
  Predictor predictor() const;

 private:
  std::map<RealVec, RealVec> table_;
  RealVec default_;
};

struct EquivalenceReport {
  std::string claim;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t sample_count = 0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  std::string detail;

  bool operator==(const EquivalenceReport&) const = default;
};

// Monte-Carlo check of the input-noise / Tikhonov correspondence for the
// linear MSE model: E[L(w, x + r)] - L(w, x) vs sigma^2 * ||w||^2.
EquivalenceReport verify_bishop(const RealVec& w, const RealVec& x, const RealVec& t,
                                double sigma, std::size_t n_mc, RandomStream& stream);

// (a) exact identity between masked forward and multiplicative-noise forward
// under shared draws; (b) trial-mean pre-activation vs p * (W y_prev).
EquivalenceReport verify_dropout_as_noise(const LayerParams& layer, const RealVec& y_prev,
                                          double p, std::size_t n_trials,
                                          RandomStream& stream);

// Trains an L2-penalized run and an input-noise run on a linear task and
// compares both final weight vectors with the closed-form ridge solution.
EquivalenceReport verify_l2_vs_noise_training(const Dataset& task, double sigma,
                                              double alpha, const TrainConfig& base,
                                              double tolerance = 0.05);

// Paired experiment over seeds: estimated gap with feature-space noise vs
// the unaugmented baseline on a hierarchical task.
EquivalenceReport verify_feature_noise_regularizes(
    const std::function<Dataset(std::uint64_t)>& make_task, const TrainConfig& base,
    const AugmentSpec& noise, std::size_t n_seeds, std::uint64_t base_seed);

// (X^T X + sigma_sq * n * I)^(-1) X^T y over the train split
RealVec ridge_closed_form(const Dataset& data, double sigma_sq);

double max_relative_difference(const RealVec& a, const RealVec& b);

}  // namespace reglab

#include "reglab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace reglab {

TrainingDiverged::TrainingDiverged(std::size_t epoch_, double loss_)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch_) +
                         " (mean loss " + std::to_string(loss_) + ")"),
      epoch(epoch_),
      loss_value(loss_) {}

namespace {

void require_shapes_match(const NetworkParams& theta, const ParamGradient& grad) {
  if (theta.layers.size() != grad.layers.size()) {
    throw std::invalid_argument("sgd_step: layer count mismatch");
  }
  for (std::size_t l = 0; l < theta.layers.size(); ++l) {
    const auto& p = theta.layers[l];
    const auto& g = grad.layers[l];
    if (g.dW.rows != p.W.rows || g.dW.cols != p.W.cols || g.db.size() != p.b.size()) {
      throw std::invalid_argument("sgd_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
}

void accumulate(ParamGradient& acc, const ParamGradient& g) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto& a = acc.layers[l];
    const auto& b = g.layers[l];
    for (std::size_t i = 0; i < a.dW.data.size(); ++i) a.dW.data[i] += b.dW.data[i];
    for (std::size_t i = 0; i < a.db.size(); ++i) a.db[i] += b.db[i];
  }
}

void scale_gradient(ParamGradient& g, double c) {
  for (auto& layer : g.layers) {
    for (auto& v : layer.dW.data) v *= c;
    for (auto& v : layer.db) v *= c;
  }
}

// adds a flat vector in the canonical flattening order (per layer: W, b)
void add_flat(ParamGradient& g, const RealVec& flat) {
  std::size_t k = 0;
  for (auto& layer : g.layers) {
    for (auto& v : layer.dW.data) v += flat[k++];
    for (auto& v : layer.db) v += flat[k++];
  }
}

double square(double v) { return v * v; }

void fisher_yates(std::vector<std::size_t>& order, RandomStream& stream) {
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t j = stream.next_below(i + 1);
    std::swap(order[i], order[j]);
  }
}

Row augmented_to_row(const AugmentedSample& sample, const Row& origin) {
  Row row;
  row.x = sample.x_hat;
  row.z = sample.z_hat;
  row.y = sample.y_hat.empty() ? origin.y : sample.y_hat;
  row.split = Split::train;
  return row;
}

double mean_loss_over(const Predictor& model, const Dataset& data,
                      const std::vector<std::size_t>& indices, LossKind kind) {
  double acc = 0.0;
  for (std::size_t i : indices) {
    acc += loss(kind, model(data.rows[i].x), data.rows[i].y);
  }
  return acc / static_cast<double>(indices.size());
}

// Gaussian elimination with partial pivoting; small dense systems only.
RealVec solve_linear(RealMat m, RealVec rhs) {
  const std::size_t n = m.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m.at(r, col)) > std::abs(m.at(pivot, col))) pivot = r;
    }
    if (std::abs(m.at(pivot, col)) < 1e-300) {
      throw std::runtime_error("solve_linear: singular system");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m.at(col, c), m.at(pivot, c));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m.at(r, col) / m.at(col, col);
      for (std::size_t c = col; c < n; ++c) m.at(r, c) -= f * m.at(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  RealVec x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= m.at(r, c) * x[c];
    x[r] = acc / m.at(r, r);
  }
  return x;
}

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double standard_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

}  // namespace

NetworkParams sgd_step(NetworkParams theta, const ParamGradient& grad, double eta) {
  require_shapes_match(theta, grad);
  for (std::size_t l = 0; l < theta.layers.size(); ++l) {
    auto& p = theta.layers[l];
    const auto& g = grad.layers[l];
    for (std::size_t i = 0; i < p.W.data.size(); ++i) p.W.data[i] -= eta * g.dW.data[i];
    for (std::size_t i = 0; i < p.b.size(); ++i) p.b[i] -= eta * g.db[i];
  }
  return theta;
}

MaskSet sample_drop_masks(const NetworkParams& theta, const DropSpec& drop,
                          RandomStream& stream) {
  if (drop.layer_index >= theta.layers.size()) {
    throw std::invalid_argument("drop: layer_index out of range");
  }
  const auto& layer = theta.layers[drop.layer_index];
  MaskSet masks(theta.layers.size());
  if (drop.granularity == DropGranularity::neuron) {
    masks[drop.layer_index].input =
        sample_neuron_mask(drop.p, layer.in_dim(), stream).r;
  } else {
    masks[drop.layer_index].weights =
        sample_weight_mask(drop.p, layer.out_dim(), layer.in_dim() + 1, stream).R;
  }
  return masks;
}

ParamGradient minibatch_gradient_core(const NetworkParams& theta,
                                      std::span<const Row> batch, LossKind kind,
                                      const std::optional<PenaltySpec>& penalty,
                                      const MaskSet& masks, double* mean_loss_out) {
  if (batch.empty()) {
    throw std::invalid_argument("minibatch_gradient: empty batch");
  }
  ParamGradient grad = zero_gradient(theta);
  double loss_sum = 0.0;
  for (const Row& row : batch) {
    accumulate(grad, backward(theta, row.x, row.y, kind, masks));
    if (mean_loss_out != nullptr) {
      loss_sum += loss(kind, forward(theta, row.x, masks).prediction(), row.y);
    }
  }
  scale_gradient(grad, 1.0 / static_cast<double>(batch.size()));
  if (penalty.has_value()) {
    add_flat(grad, penalty_grad(flatten_params(theta), *penalty));
  }
  if (mean_loss_out != nullptr) {
    *mean_loss_out = loss_sum / static_cast<double>(batch.size());
  }
  return grad;
}

ParamGradient minibatch_gradient(const NetworkParams& theta, std::span<const Row> batch,
                                 LossKind kind, const std::optional<PenaltySpec>& penalty,
                                 const std::optional<DropSpec>& drop,
                                 RandomStream& stream) {
  MaskSet masks;
  if (drop.has_value()) {
    masks = sample_drop_masks(theta, *drop, stream);
  }
  return minibatch_gradient_core(theta, batch, kind, penalty, masks, nullptr);
}

TrainResult train(const TrainConfig& config, const Dataset& data) {
  data.validate();
  const auto train_idx = data.train_indices();
  if (train_idx.empty()) throw std::invalid_argument("train: empty train split");
  if (!(config.eta > 0.0)) throw std::invalid_argument("train: eta must be > 0");
  if (config.minibatch_size == 0 || config.minibatch_size > train_idx.size()) {
    throw std::invalid_argument("train: minibatch_size must be in [1, train size]");
  }
  if (config.topology.empty()) throw std::invalid_argument("train: empty topology");
  if (config.drop.has_value() &&
      !(config.drop->p >= 0.0 && config.drop->p <= 1.0)) {
    throw std::invalid_argument("train: drop.p must be in [0, 1]");
  }

  RandomStream root(config.seed);
  RandomStream init_stream = root.split("init");
  RandomStream shuffle_stream = root.split("shuffle");
  RandomStream mask_stream = root.split("mask");
  RandomStream noise_stream = root.split("noise");

  NetworkParams params = init_network(data.input_dim(), config.topology, init_stream);
  if (params.output_dim() != data.label_dim()) {
    throw std::invalid_argument("train: output dim " +
                                std::to_string(params.output_dim()) +
                                " does not match label dim " +
                                std::to_string(data.label_dim()));
  }
  if (config.drop.has_value() && config.drop->layer_index >= params.layers.size()) {
    throw std::invalid_argument("train: drop.layer_index out of range");
  }

  std::vector<Row> pool;
  pool.reserve(train_idx.size());
  for (std::size_t i : train_idx) pool.push_back(data.rows[i]);

  const bool fresh_augment =
      config.augmentation.has_value() &&
      config.augmentation->application == AugmentPlan::Application::fresh;
  if (config.augmentation.has_value() &&
      config.augmentation->application == AugmentPlan::Application::frozen) {
    const std::size_t originals = pool.size();
    for (std::size_t c = 0; c < config.augmentation->frozen_copies; ++c) {
      for (std::size_t i = 0; i < originals; ++i) {
        const AugmentedSample s =
            augment_row(pool[i], config.augmentation->spec, noise_stream, i);
        pool.push_back(augmented_to_row(s, pool[i]));
      }
    }
  }

  const std::size_t n = pool.size();
  const std::size_t m = config.minibatch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.sampling == SamplingMode::shuffle) {
      fisher_yates(order, shuffle_stream);
    }
    MaskSet epoch_masks;
    if (config.drop.has_value() &&
        config.mask_granularity == MaskGranularity::per_epoch) {
      epoch_masks = sample_drop_masks(params, *config.drop, mask_stream);
    }

    double loss_sum = 0.0;
    std::size_t presented = 0;
    const std::size_t n_batches = (n + m - 1) / m;
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::vector<Row> batch;
      if (config.sampling == SamplingMode::shuffle) {
        const std::size_t lo = b * m;
        const std::size_t hi = std::min(lo + m, n);
        for (std::size_t k = lo; k < hi; ++k) batch.push_back(pool[order[k]]);
      } else {
        for (std::size_t k = 0; k < m; ++k) {
          batch.push_back(pool[shuffle_stream.next_below(n)]);
        }
      }
      if (fresh_augment) {
        for (std::size_t k = 0; k < batch.size(); ++k) {
          const AugmentedSample s =
              augment_row(batch[k], config.augmentation->spec, noise_stream, k);
          batch[k] = augmented_to_row(s, batch[k]);
        }
      }

      MaskSet masks = epoch_masks;
      if (config.drop.has_value() &&
          config.mask_granularity == MaskGranularity::per_minibatch) {
        masks = sample_drop_masks(params, *config.drop, mask_stream);
      }

      double batch_loss = 0.0;
      const ParamGradient g = minibatch_gradient_core(params, batch, config.loss,
                                                      config.penalty, masks, &batch_loss);
      params = sgd_step(std::move(params), g, config.eta);
      loss_sum += batch_loss * static_cast<double>(batch.size());
      presented += batch.size();
    }

    const double epoch_loss = loss_sum / static_cast<double>(presented);
    if (!std::isfinite(epoch_loss) || epoch_loss > 1e12) {
      throw TrainingDiverged(epoch, epoch_loss);
    }
    result.trajectory.push_back(epoch_loss);
  }

  if (config.drop.has_value()) {
    params = inference_scale(std::move(params), config.drop->p, config.scale_mode,
                             {config.drop->layer_index});
  }
  result.params = std::move(params);
  return result;
}

Predictor network_predictor(const NetworkParams& params) {
  return [params](const RealVec& x) { return forward(params, x).prediction(); };
}

GapReport gap_exact(const Predictor& model, const Dataset& data, LossKind kind) {
  if (!data.has_domain_rows()) {
    throw std::invalid_argument("gap_exact: missing full-domain split (no rows tagged domain)");
  }
  const auto train_idx = data.train_indices();
  if (train_idx.empty()) throw std::invalid_argument("gap_exact: empty train split");

  std::vector<std::size_t> all(data.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  GapReport report;
  report.estimator = GapReport::Estimator::exact;
  report.train_loss = mean_loss_over(model, data, train_idx, kind);
  report.eval_loss = mean_loss_over(model, data, all, kind);
  report.gap = report.eval_loss - report.train_loss;
  return report;
}

GapReport gap_exact(const NetworkParams& params, const Dataset& data, LossKind kind) {
  return gap_exact(network_predictor(params), data, kind);
}

GapReport gap_estimate(const Predictor& model, const Dataset& data, LossKind kind) {
  const auto train_idx = data.train_indices();
  const auto val_idx = data.val_indices();
  if (train_idx.empty()) throw std::invalid_argument("gap_estimate: empty train split");
  if (val_idx.empty()) throw std::invalid_argument("gap_estimate: empty val split");

  GapReport report;
  report.estimator = GapReport::Estimator::validation;
  report.train_loss = mean_loss_over(model, data, train_idx, kind);
  report.eval_loss = mean_loss_over(model, data, val_idx, kind);
  report.gap = report.eval_loss - report.train_loss;
  return report;
}

GapReport gap_estimate(const NetworkParams& params, const Dataset& data, LossKind kind) {
  return gap_estimate(network_predictor(params), data, kind);
}

Memorizer::Memorizer(const Dataset& data, RealVec default_prediction)
    : default_(std::move(default_prediction)) {
  for (const auto& row : data.rows) {
    if (row.split == Split::train) table_[row.x] = row.y;
  }
}

RealVec Memorizer::predict(const RealVec& x) const {
  const auto it = table_.find(x);
  return it != table_.end() ? it->second : default_;
}

Predictor Memorizer::predictor() const {
  return [this](const RealVec& x) { return predict(x); };
}

EquivalenceReport verify_bishop(const RealVec& w, const RealVec& x, const RealVec& t,
                                double sigma, std::size_t n_mc, RandomStream& stream) {
  if (t.size() != 1) {
    throw std::invalid_argument("verify_bishop: scalar target expected");
  }
  if (w.size() != x.size()) {
    throw std::invalid_argument("verify_bishop: w and x length mismatch");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("verify_bishop: sigma must be > 0");
  if (n_mc < 1000) {
    throw std::invalid_argument("verify_bishop: n_mc must be >= 1000");
  }

  const double clean = square(dot(w, x) - t[0]);
  Welford stats;
  RealVec noisy(x.size());
  for (std::size_t i = 0; i < n_mc; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      noisy[j] = x[j] + stream.next_gaussian(0.0, sigma);
    }
    stats.push(square(dot(w, noisy) - t[0]) - clean);
  }

  const double closed_form = sigma * sigma * l2_norm_sq(w);
  EquivalenceReport report;
  report.claim = "bishop_input_noise_tikhonov";
  report.discrepancy = std::abs(stats.mean - closed_form);
  report.standard_error = stats.standard_error();
  report.tolerance = 3.0 * report.standard_error;
  report.pass = report.discrepancy <= report.tolerance;
  report.sample_count = n_mc;
  report.seed = stream.seed();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "mc=%.6e closed=%.6e sigma=%g", stats.mean,
                closed_form, sigma);
  report.detail = buf;
  return report;
}

EquivalenceReport verify_dropout_as_noise(const LayerParams& layer, const RealVec& y_prev,
                                          double p, std::size_t n_trials,
                                          RandomStream& stream) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("verify_dropout_as_noise: p must be in [0, 1]");
  }
  const RealVec target = vec_scale(matvec(layer.W, y_prev), p);
  std::vector<Welford> stats(layer.out_dim());
  std::size_t exact_failures = 0;

  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    const NeuronMask mask = sample_neuron_mask(p, y_prev.size(), stream);
    const RealVec via_dropout = dropout_forward(layer, y_prev, mask);
    const RealVec via_noise = layer_forward(layer, noise_multiplicative(y_prev, mask.r));
    if (via_dropout != via_noise) ++exact_failures;

    const RealVec pre = matvec(layer.W, hadamard(mask.r, y_prev));
    for (std::size_t i = 0; i < pre.size(); ++i) stats[i].push(pre[i]);
  }

  double z_max = 0.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double se = stats[i].standard_error();
    const double z = std::abs(stats[i].mean - target[i]) / std::max(se, 1e-30);
    z_max = std::max(z_max, z);
  }

  EquivalenceReport report;
  report.claim = "dropout_as_multiplicative_noise";
  report.discrepancy =
      exact_failures > 0 ? std::numeric_limits<double>::infinity() : z_max;
  report.tolerance = 4.0;
  report.pass = report.discrepancy <= report.tolerance;
  report.sample_count = n_trials;
  report.standard_error = stats.empty() ? 0.0 : stats.front().standard_error();
  report.seed = stream.seed();
  report.detail = "exact_failures=" + std::to_string(exact_failures) +
                  " expectation_z=" + std::to_string(z_max);
  return report;
}

RealVec ridge_closed_form(const Dataset& data, double sigma_sq) {
  const auto train_idx = data.train_indices();
  if (train_idx.empty()) throw std::invalid_argument("ridge: empty train split");
  if (data.label_dim() != 1) throw std::invalid_argument("ridge: scalar labels expected");

  const std::size_t d = data.input_dim();
  const std::size_t n = train_idx.size();
  RealMat m(d, d);
  RealVec rhs(d, 0.0);
  for (std::size_t idx : train_idx) {
    const Row& row = data.rows[idx];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) m.at(i, j) += row.x[i] * row.x[j];
      rhs[i] += row.x[i] * row.y[0];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    m.at(i, i) += sigma_sq * static_cast<double>(n);
  }
  return solve_linear(std::move(m), std::move(rhs));
}

double max_relative_difference(const RealVec& a, const RealVec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("max_relative_difference: length mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-12});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

EquivalenceReport verify_l2_vs_noise_training(const Dataset& task, double sigma,
                                              double alpha, const TrainConfig& base,
                                              double tolerance) {
  if (base.topology.size() != 1 ||
      base.topology.front().activation != ActivationKind::identity ||
      base.loss != LossKind::mse) {
    throw std::invalid_argument(
        "verify_l2_vs_noise_training: requires a single linear layer with mse loss");
  }
  TrainConfig penalized = base;
  penalized.penalty = PenaltySpec{PenaltyKind::l2, alpha};
  penalized.augmentation.reset();
  penalized.drop.reset();

  TrainConfig noised = base;
  noised.penalty.reset();
  noised.drop.reset();
  AugmentPlan plan;
  plan.spec.noise = NoiseSpec{NoiseMode::additive, DistSpec::gaussian(0.0, sigma)};
  plan.spec.target = AugmentTarget::input;
  plan.application = AugmentPlan::Application::fresh;
  noised.augmentation = plan;

  const TrainResult run_a = train(penalized, task);
  const TrainResult run_b = train(noised, task);

  const RealVec w_a = run_a.params.layers.front().W.data;
  const RealVec w_b = run_b.params.layers.front().W.data;
  const RealVec w_ridge = ridge_closed_form(task, sigma * sigma);

  const double d_ab = max_relative_difference(w_a, w_b);
  const double d_ar = max_relative_difference(w_a, w_ridge);
  const double d_br = max_relative_difference(w_b, w_ridge);

  EquivalenceReport report;
  report.claim = "l2_penalty_equals_input_noise_training";
  report.discrepancy = std::max({d_ab, d_ar, d_br});
  report.tolerance = tolerance;
  report.pass = report.discrepancy <= report.tolerance;
  report.sample_count = task.train_indices().size();
  report.seed = base.seed;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "penalty_vs_noise=%.4f penalty_vs_ridge=%.4f noise_vs_ridge=%.4f "
                "sigma=%g alpha=%g",
                d_ab, d_ar, d_br, sigma, alpha);
  report.detail = buf;
  return report;
}

EquivalenceReport verify_feature_noise_regularizes(
    const std::function<Dataset(std::uint64_t)>& make_task, const TrainConfig& base,
    const AugmentSpec& noise, std::size_t n_seeds, std::uint64_t base_seed) {
  if (n_seeds < 10) {
    throw std::invalid_argument("verify_feature_noise_regularizes: need >= 10 seeds");
  }

  double sum_baseline = 0.0;
  double sum_noised = 0.0;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed = base_seed + i;
    const Dataset data = make_task(seed);

    // degenerate task guard: labels must vary
    Welford label_spread;
    for (const auto& row : data.rows) {
      for (double v : row.y) label_spread.push(v);
    }
    if (!(label_spread.variance() > 0.0)) {
      throw std::invalid_argument("verify_feature_noise_regularizes: zero-variance labels");
    }

    TrainConfig baseline = base;
    baseline.seed = seed;
    baseline.augmentation.reset();

    TrainConfig noised = base;
    noised.seed = seed;
    AugmentPlan plan;
    plan.spec = noise;
    plan.application = AugmentPlan::Application::fresh;
    noised.augmentation = plan;

    const double gap_a = gap_estimate(train(baseline, data).params, data, base.loss).gap;
    const double gap_b = gap_estimate(train(noised, data).params, data, base.loss).gap;
    sum_baseline += gap_a;
    sum_noised += gap_b;
    if (gap_b < gap_a) ++wins;
  }

  const double mean_a = sum_baseline / static_cast<double>(n_seeds);
  const double mean_b = sum_noised / static_cast<double>(n_seeds);
  const double margin = mean_b - mean_a;
  const std::size_t needed = (n_seeds * 8 + 9) / 10;  // ceil(0.8 n)
  const bool ok = margin < 0.0 && wins >= needed;

  EquivalenceReport report;
  report.claim = "feature_noise_reduces_gap";
  // negative margin when both conditions hold, a positive shortfall otherwise
  report.discrepancy =
      ok ? margin
         : std::max({margin, static_cast<double>(wins < needed ? needed - wins : 0),
                     std::numeric_limits<double>::min()});
  report.tolerance = 0.0;
  report.pass = report.discrepancy <= report.tolerance;
  report.sample_count = n_seeds;
  report.seed = base_seed;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "mean_gap_baseline=%.6f mean_gap_noised=%.6f margin=%.6f wins=%zu/%zu",
                mean_a, mean_b, margin, wins, n_seeds);
  report.detail = buf;
  return report;
}

}  // namespace reglab

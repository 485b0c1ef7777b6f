#include "reglab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "reglab/tasks.hpp"

namespace reglab {

namespace {

ActivationKind pick_activation(RandomStream& stream) {
  switch (stream.next_below(4)) {
    case 0: return ActivationKind::identity;
    case 1: return ActivationKind::sigmoid;
    case 2: return ActivationKind::tanh;
    default: return ActivationKind::relu;
  }
}

LayerParams random_layer(std::size_t out_dim, std::size_t in_dim, RandomStream& stream) {
  LayerParams layer;
  layer.W = RealMat(out_dim, in_dim);
  for (auto& w : layer.W.data) w = stream.next_uniform(-2.0, 2.0);
  layer.b.resize(out_dim);
  for (auto& b : layer.b) b = stream.next_uniform(-1.0, 1.0);
  layer.activation = pick_activation(stream);
  return layer;
}

RealVec random_vec(std::size_t n, double lo, double hi, RandomStream& stream) {
  RealVec v(n);
  for (auto& x : v) x = stream.next_uniform(lo, hi);
  return v;
}

EquivalenceReport check_eq13_reduction(std::uint64_t seed) {
  RandomStream stream = RandomStream(seed).split("eq13");
  std::size_t mismatches = 0;
  double max_diff = 0.0;
  constexpr std::size_t kCases = 100;
  for (std::size_t c = 0; c < kCases; ++c) {
    const std::size_t out_dim = 1 + stream.next_below(6);
    const std::size_t in_dim = 1 + stream.next_below(6);
    const LayerParams layer = random_layer(out_dim, in_dim, stream);
    const RealVec y = random_vec(in_dim, -2.0, 2.0, stream);
    const double p = stream.next_uniform();
    const NeuronMask mask = sample_neuron_mask(p, in_dim, stream);

    const RealVec via_dropout = dropout_forward(layer, y, mask);
    const RealVec via_dropconnect =
        dropconnect_forward(augmented_weights(layer), augmented_input(y),
                            embed_neuron_mask(mask, out_dim), layer.activation);
    for (std::size_t i = 0; i < out_dim; ++i) {
      if (via_dropout[i] != via_dropconnect[i]) {
        ++mismatches;
        max_diff = std::max(max_diff, std::abs(via_dropout[i] - via_dropconnect[i]));
      }
    }
  }

  EquivalenceReport report;
  report.claim = "eq13_dropout_dropconnect_reduction";
  report.discrepancy =
      mismatches > 0 ? std::max(max_diff, std::numeric_limits<double>::min()) : 0.0;
  report.tolerance = 0.0;
  report.pass = mismatches == 0;
  report.sample_count = kCases;
  report.seed = seed;
  report.detail = "mismatched_components=" + std::to_string(mismatches);
  return report;
}

EquivalenceReport check_gradients(std::uint64_t seed) {
  RandomStream stream = RandomStream(seed).split("gradcheck");
  double worst = 0.0;
  constexpr std::size_t kNets = 50;
  for (std::size_t n = 0; n < kNets; ++n) {
    const LossKind kind = n % 2 == 0 ? LossKind::mse : LossKind::bce;
    const std::size_t depth = 1 + stream.next_below(3);
    const std::size_t input_dim = 1 + stream.next_below(6);

    std::vector<LayerSpec> topology;
    for (std::size_t l = 0; l < depth; ++l) {
      topology.push_back({1 + stream.next_below(6), pick_activation(stream)});
    }
    if (kind == LossKind::bce) {
      topology.back().activation = ActivationKind::sigmoid;
    }

    NetworkParams params = init_network(input_dim, topology, stream);
    for (auto& layer : params.layers) {
      for (auto& b : layer.b) b = stream.next_uniform(-0.5, 0.5);
    }

    const RealVec x = random_vec(input_dim, -1.0, 1.0, stream);
    RealVec target(params.output_dim());
    for (auto& t : target) {
      t = kind == LossKind::mse ? stream.next_uniform(-1.0, 1.0)
                                : stream.next_bernoulli(0.5);
    }
    worst = std::max(worst, grad_check(params, x, target, kind));
  }

  EquivalenceReport report;
  report.claim = "backward_matches_finite_differences";
  report.discrepancy = worst;
  report.tolerance = 1e-5;
  report.pass = worst < 1e-5;
  report.sample_count = kNets;
  report.seed = seed;
  return report;
}

EquivalenceReport check_bishop_for_sigma(double sigma, std::uint64_t seed) {
  char sigma_text[24];
  std::snprintf(sigma_text, sizeof(sigma_text), "%g", sigma);
  RandomStream stream = RandomStream(seed).split(std::string("bishop-") + sigma_text);

  constexpr std::size_t kSeeds = 100;
  constexpr std::size_t kMcDraws = 100000;
  std::size_t failures = 0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const std::size_t dim = 2 + stream.next_below(3);
    const RealVec w = random_vec(dim, -2.0, 2.0, stream);
    const RealVec x = random_vec(dim, -1.0, 1.0, stream);
    const RealVec t = {stream.next_uniform(-1.0, 1.0)};
    if (!verify_bishop(w, x, t, sigma, kMcDraws, stream).pass) ++failures;
  }

  EquivalenceReport report;
  report.claim = std::string("bishop_calibration_sigma=") + sigma_text;
  report.discrepancy = static_cast<double>(failures);
  report.tolerance = 5.0;  // pass rate >= 95/100
  report.pass = failures <= 5;
  report.sample_count = kSeeds;
  report.seed = seed;
  report.detail = "failures=" + std::to_string(failures) + "/100 n_mc=100000";
  return report;
}

EquivalenceReport check_dropout_as_noise(std::uint64_t seed) {
  RandomStream stream = RandomStream(seed).split("dropnoise");
  const std::size_t out_dim = 1 + stream.next_below(4);
  const std::size_t in_dim = 1 + stream.next_below(4);
  const LayerParams layer = random_layer(out_dim, in_dim, stream);
  const RealVec y = random_vec(in_dim, -2.0, 2.0, stream);
  EquivalenceReport report = verify_dropout_as_noise(layer, y, 0.5, 10000, stream);
  report.seed = seed;
  return report;
}

EquivalenceReport check_l2_vs_noise(std::uint64_t seed) {
  TrainConfig base;
  base.topology = {{1, ActivationKind::identity}};
  base.loss = LossKind::mse;
  base.eta = 0.02;
  base.epochs = 2000;
  base.minibatch_size = 8;
  base.seed = seed;
  const double sigma = 0.1;
  return verify_l2_vs_noise_training(tasks::linreg2d_v1().data, sigma, sigma * sigma,
                                     base);
}

EquivalenceReport check_feature_noise_gap(std::uint64_t seed) {
  TrainConfig base;
  base.topology = {{8, ActivationKind::tanh}, {1, ActivationKind::sigmoid}};
  base.loss = LossKind::bce;
  base.eta = 0.25;
  base.epochs = 600;
  base.minibatch_size = 8;

  AugmentSpec noise;
  noise.noise = NoiseSpec{NoiseMode::additive, DistSpec::gaussian(0.0, 0.45)};
  noise.target = AugmentTarget::feature;
  noise.decoder = tasks::hier_z4x16_decoder();

  const auto make_task = [](std::uint64_t s) { return tasks::hier_z4x16_v1(s).data; };
  return verify_feature_noise_regularizes(make_task, base, noise, 10, seed);
}

Dataset two_class_blobs(double spread) {
  // fixed reference data; only the generator draws vary with the trial seed
  RandomStream stream(0xDA7A);
  Dataset data;
  const std::vector<RealVec> means = {{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  for (std::size_t cls = 0; cls < means.size(); ++cls) {
    for (std::size_t i = 0; i < 50; ++i) {
      Row row;
      row.x.resize(3);
      for (std::size_t d = 0; d < 3; ++d) {
        row.x[d] = means[cls][d] + stream.next_gaussian(0.0, spread);
      }
      row.y = {static_cast<double>(cls)};
      data.rows.push_back(std::move(row));
    }
  }
  return data;
}

std::vector<EquivalenceReport> check_scheme_calibration(std::uint64_t seed) {
  constexpr std::size_t kTrials = 100;
  const SchemeTolerances tol;

  const Dataset normal = two_class_blobs(0.5);
  const Dataset low_variance = two_class_blobs(0.05);

  AugmentSpec identity;
  identity.noise = NoiseSpec{NoiseMode::additive, DistSpec::gaussian(0.0, 0.0)};
  AugmentSpec shifted;
  shifted.noise = NoiseSpec{NoiseMode::additive, DistSpec::uniform(10.0, 10.0)};
  AugmentSpec unit_noise;
  unit_noise.noise = NoiseSpec{NoiseMode::additive, DistSpec::gaussian(0.0, 1.0)};

  std::size_t identity_failures = 0;
  std::size_t shift_passes = 0;
  std::size_t cov_not_failed = 0;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    RandomStream stream = RandomStream(seed + trial).split("scheme");
    if (!scheme_check(normal, identity, 200, tol, stream).pass) ++identity_failures;
    if (scheme_check(normal, shifted, 200, tol, stream).pass) ++shift_passes;
    if (scheme_check(low_variance, unit_noise, 200, tol, stream).cov_pass) {
      ++cov_not_failed;
    }
  }

  std::vector<EquivalenceReport> reports(3);
  reports[0].claim = "scheme_identity_passes";
  reports[0].discrepancy = static_cast<double>(identity_failures);
  reports[0].tolerance = 0.0;  // 100/100
  reports[0].pass = identity_failures == 0;

  reports[1].claim = "scheme_mean_shift_fails";
  reports[1].discrepancy = static_cast<double>(shift_passes);
  reports[1].tolerance = 1.0;  // fails on >= 99/100
  reports[1].pass = shift_passes <= 1;

  reports[2].claim = "scheme_cov_noise_fails";
  reports[2].discrepancy = static_cast<double>(cov_not_failed);
  reports[2].tolerance = 5.0;  // covariance check fails on >= 95/100
  reports[2].pass = cov_not_failed <= 5;

  for (auto& r : reports) {
    r.sample_count = kTrials;
    r.seed = seed;
  }
  return reports;
}

EquivalenceReport check_mask_count(std::uint64_t seed) {
  std::size_t mismatches = 0;
  std::string detail;
  for (std::size_t n = 0; n <= 4; ++n) {
    std::set<std::vector<double>> distinct;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      std::vector<double> mask(n);
      for (std::size_t j = 0; j < n; ++j) mask[j] = (bits >> j) & 1 ? 1.0 : 0.0;
      distinct.insert(std::move(mask));
    }
    if (distinct.size() != count_mask_patterns(n)) ++mismatches;
    detail += "n=" + std::to_string(n) + ":" + std::to_string(distinct.size()) + " ";
  }

  EquivalenceReport report;
  report.claim = "thinned_network_count";
  report.discrepancy = static_cast<double>(mismatches);
  report.tolerance = 0.0;
  report.pass = mismatches == 0;
  report.sample_count = 5;
  report.seed = seed;
  report.detail = detail;
  return report;
}

}  // namespace

std::vector<std::string> verification_names() {
  return {"eq13_reduction", "gradient_check",     "bishop",
          "dropout_as_noise", "l2_vs_noise",      "feature_noise_gap",
          "scheme_check_calibration", "mask_count"};
}

bool is_verification(const std::string& name) {
  const auto names = verification_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<EquivalenceReport> run_verification(const std::string& name,
                                                std::uint64_t seed) {
  if (name == "eq13_reduction") return {check_eq13_reduction(seed)};
  if (name == "gradient_check") return {check_gradients(seed)};
  if (name == "bishop") {
    return {check_bishop_for_sigma(0.01, seed), check_bishop_for_sigma(0.1, seed)};
  }
  if (name == "dropout_as_noise") return {check_dropout_as_noise(seed)};
  if (name == "l2_vs_noise") return {check_l2_vs_noise(seed)};
  if (name == "feature_noise_gap") return {check_feature_noise_gap(seed)};
  if (name == "scheme_check_calibration") return check_scheme_calibration(seed);
  if (name == "mask_count") return {check_mask_count(seed)};
  throw std::invalid_argument("unknown verification: " + name);
}

}  // namespace reglab

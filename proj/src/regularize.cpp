#include "reglab/regularize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace reglab {

namespace {

void require_alpha(const PenaltySpec& spec) {
  if (!(spec.alpha >= 0.0)) {
    throw std::invalid_argument("penalty: alpha must be >= 0");
  }
}

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("drop: p must be in [0, 1]");
  }
}

}  // namespace

double penalized_loss(double base, const RealVec& theta_flat, const PenaltySpec& spec) {
  require_alpha(spec);
  switch (spec.kind) {
    case PenaltyKind::l1: return base + spec.alpha * l1_norm(theta_flat);
    case PenaltyKind::l2: return base + spec.alpha * l2_norm_sq(theta_flat);
  }
  throw std::logic_error("penalized_loss: bad kind");
}

RealVec penalty_grad(const RealVec& theta_flat, const PenaltySpec& spec) {
  require_alpha(spec);
  RealVec g(theta_flat.size());
  switch (spec.kind) {
    case PenaltyKind::l1:
      for (std::size_t i = 0; i < theta_flat.size(); ++i) {
        const double t = theta_flat[i];
        g[i] = t > 0.0 ? spec.alpha : (t < 0.0 ? -spec.alpha : 0.0);
      }
      break;
    case PenaltyKind::l2:
      for (std::size_t i = 0; i < theta_flat.size(); ++i) {
        g[i] = 2.0 * spec.alpha * theta_flat[i];
      }
      break;
  }
  return g;
}

RealVec dropout_forward(const LayerParams& layer, const RealVec& y_prev,
                        const NeuronMask& mask) {
  if (mask.r.size() != y_prev.size()) {
    throw std::invalid_argument("dropout_forward: mask length " +
                                std::to_string(mask.r.size()) +
                                " does not match input length " +
                                std::to_string(y_prev.size()));
  }
  return layer_forward(layer, hadamard(mask.r, y_prev));
}

RealVec dropconnect_forward(const RealMat& W_aug, const RealVec& y_prev_aug,
                            const WeightMask& mask, ActivationKind activation) {
  if (mask.R.rows != W_aug.rows || mask.R.cols != W_aug.cols) {
    throw std::invalid_argument("dropconnect_forward: mask shape mismatch");
  }
  RealVec z = matvec(mat_hadamard(mask.R, W_aug), y_prev_aug);
  for (auto& v : z) v = activate(activation, v);
  return z;
}

RealMat augmented_weights(const LayerParams& layer) {
  RealMat aug(layer.W.rows, layer.W.cols + 1);
  for (std::size_t i = 0; i < layer.W.rows; ++i) {
    for (std::size_t j = 0; j < layer.W.cols; ++j) aug.at(i, j) = layer.W.at(i, j);
    aug.at(i, layer.W.cols) = layer.b[i];
  }
  return aug;
}

RealVec augmented_input(const RealVec& y_prev) {
  RealVec aug = y_prev;
  aug.push_back(1.0);
  return aug;
}

WeightMask embed_neuron_mask(const NeuronMask& mask, std::size_t out_rows) {
  WeightMask out;
  out.R = RealMat(out_rows, mask.r.size() + 1);
  for (std::size_t i = 0; i < out_rows; ++i) {
    for (std::size_t j = 0; j < mask.r.size(); ++j) out.R.at(i, j) = mask.r[j];
    out.R.at(i, mask.r.size()) = 1.0;
  }
  return out;
}

NeuronMask sample_neuron_mask(double p, std::size_t n, RandomStream& stream) {
  require_probability(p);
  NeuronMask mask;
  mask.r.resize(n);
  for (auto& r : mask.r) r = stream.next_bernoulli(p);
  return mask;
}

WeightMask sample_weight_mask(double p, std::size_t out_rows,
                              std::size_t cols_with_bias, RandomStream& stream) {
  require_probability(p);
  WeightMask mask;
  mask.R = RealMat(out_rows, cols_with_bias);
  for (auto& r : mask.R.data) r = stream.next_bernoulli(p);
  return mask;
}

NetworkParams inference_scale(NetworkParams params, double p, ScaleMode mode) {
  std::vector<std::size_t> all;
  for (std::size_t l = 0; l < params.layers.size(); ++l) all.push_back(l);
  return inference_scale(std::move(params), p, mode, all);
}

NetworkParams inference_scale(NetworkParams params, double p, ScaleMode mode,
                              const std::vector<std::size_t>& layer_indices) {
  if (!(p > 0.0 && p <= 1.0)) {
    if (mode == ScaleMode::inverse_p) {
      throw std::invalid_argument("inference_scale: 1/p undefined for p <= 0");
    }
    require_probability(p);
  }
  const double factor = mode == ScaleMode::inverse_p ? 1.0 / p : p;
  for (std::size_t l : layer_indices) {
    if (l >= params.layers.size()) {
      throw std::invalid_argument("inference_scale: layer index out of range");
    }
    for (auto& w : params.layers[l].W.data) w *= factor;
  }
  return params;
}

std::uint64_t count_mask_patterns(std::size_t n_units) {
  if (n_units > 30) {
    throw std::invalid_argument("count_mask_patterns: n_units > 30 would overflow the guard");
  }
  return std::uint64_t{1} << n_units;
}

}  // namespace reglab

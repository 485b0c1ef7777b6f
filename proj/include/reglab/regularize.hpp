#pragma once

#include <cstdint>
#include <vector>

#include "reglab/net.hpp"
#include "reglab/numkit.hpp"

namespace reglab {

enum class PenaltyKind { l1, l2 };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::l2;
  double alpha = 0.0;  // >= 0

  bool operator==(const PenaltySpec&) const = default;
};

enum class DropGranularity { neuron, weight };

// p is the RETENTION probability: a mask entry of 1 keeps the unit/weight.
struct DropSpec {
  double p = 1.0;
  DropGranularity granularity = DropGranularity::neuron;
  std::size_t layer_index = 0;  // the layer whose input (or weights) is masked

  bool operator==(const DropSpec&) const = default;
};

enum class ScaleMode { inverse_p, retention_p };

struct NeuronMask {
  RealVec r;  // 0/1 entries, one per incoming activation
};

struct WeightMask {
  RealMat R;  // 0/1 entries, shaped like the bias-augmented weight matrix
};

double penalized_loss(double base, const RealVec& theta_flat, const PenaltySpec& spec);
// l1 -> alpha * sign(theta) with sign(0) = 0; l2 -> 2 * alpha * theta
RealVec penalty_grad(const RealVec& theta_flat, const PenaltySpec& spec);

// f(W (r * y_prev) + b); the mask multiplies the incoming activations
RealVec dropout_forward(const LayerParams& layer, const RealVec& y_prev,
                        const NeuronMask& mask);

// f((R * W_aug) y_prev_aug) where W_aug carries the bias as its last column
RealVec dropconnect_forward(const RealMat& W_aug, const RealVec& y_prev_aug,
                            const WeightMask& mask, ActivationKind activation);

RealMat augmented_weights(const LayerParams& layer);  // [W | b]
RealVec augmented_input(const RealVec& y_prev);       // [y ; 1]

// Diagonal-mask embedding: every output row shares the input mask pattern
// and the bias column is all ones.
WeightMask embed_neuron_mask(const NeuronMask& mask, std::size_t out_rows);

NeuronMask sample_neuron_mask(double p, std::size_t n, RandomStream& stream);
WeightMask sample_weight_mask(double p, std::size_t out_rows,
                              std::size_t cols_with_bias, RandomStream& stream);

// Post-training compensation for masked training. inverse_p multiplies
// trained weights by 1/p, retention_p by p. Biases are left untouched.
NetworkParams inference_scale(NetworkParams params, double p, ScaleMode mode);
NetworkParams inference_scale(NetworkParams params, double p, ScaleMode mode,
                              const std::vector<std::size_t>& layer_indices);

// 2^n_units distinct mask patterns; guarded for n_units <= 30
std::uint64_t count_mask_patterns(std::size_t n_units);

}  // namespace reglab

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "reglab/numkit.hpp"

namespace reglab {

enum class ActivationKind { identity, sigmoid, tanh, relu };
enum class LossKind { mse, bce };

double activate(ActivationKind kind, double z);
// exact closed-form derivative; relu uses subgradient 0 at z == 0
double activate_derivative(ActivationKind kind, double z);

std::string_view activation_name(ActivationKind kind);
std::string_view loss_name(LossKind kind);

// predicted probabilities are clamped to [kBceClamp, 1 - kBceClamp]
inline constexpr double kBceClamp = 1e-12;

struct LayerParams {
  RealMat W;  // out_dim x in_dim
  RealVec b;  // out_dim
  ActivationKind activation = ActivationKind::identity;

  std::size_t in_dim() const { return W.cols; }
  std::size_t out_dim() const { return W.rows; }

  bool operator==(const LayerParams&) const = default;
};

struct NetworkParams {
  std::vector<LayerParams> layers;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }

  bool operator==(const NetworkParams&) const = default;
};

void validate_network(const NetworkParams& params);

// Optional training-time masks, one entry per layer. An empty member means
// "unmasked". `input` multiplies the layer's incoming activations (per-neuron
// drop); `weights` is out x (in+1) and masks [W | b] elementwise (per-weight
// drop, bias column included).
struct LayerMask {
  RealVec input;
  RealMat weights;
};
using MaskSet = std::vector<LayerMask>;

struct ForwardTrace {
  std::vector<RealVec> inputs;  // effective (possibly masked) input per layer
  std::vector<RealVec> pre;     // pre-activation per layer
  std::vector<RealVec> act;     // activation per layer

  const RealVec& prediction() const { return act.back(); }
};

RealVec layer_forward(const LayerParams& layer, const RealVec& y_prev);
ForwardTrace forward(const NetworkParams& params, const RealVec& x,
                     const MaskSet& masks = {});
double loss(LossKind kind, const RealVec& pred, const RealVec& target);

struct ParamGradient {
  struct LayerGrad {
    RealMat dW;
    RealVec db;
  };
  std::vector<LayerGrad> layers;
};

ParamGradient zero_gradient(const NetworkParams& params);

ParamGradient backward(const NetworkParams& params, const RealVec& x,
                       const RealVec& target, LossKind kind,
                       const MaskSet& masks = {});

// Max relative error between backward and central finite differences
// (h = 1e-5). Parameters whose evaluation puts a relu pre-activation
// within 1e-4 of the kink are excluded.
double grad_check(const NetworkParams& params, const RealVec& x,
                  const RealVec& target, LossKind kind);

// canonical flattening order: per layer, W row-major then b
RealVec flatten_params(const NetworkParams& params);
std::size_t param_count(const NetworkParams& params);

struct LayerSpec {
  std::size_t units = 0;
  ActivationKind activation = ActivationKind::identity;

  bool operator==(const LayerSpec&) const = default;
};

// Uniform [-s, s] weights with s = sqrt(6 / (in + out)), zero biases.
NetworkParams init_network(std::size_t input_dim,
                           const std::vector<LayerSpec>& topology,
                           RandomStream& stream);

}  // namespace reglab

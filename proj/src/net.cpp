#include "reglab/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace reglab {

double activate(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::identity: return z;
    case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case ActivationKind::tanh: return std::tanh(z);
    case ActivationKind::relu: return z > 0.0 ? z : 0.0;
  }
  throw std::logic_error("activate: bad kind");
}

double activate_derivative(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::identity: return 1.0;
    case ActivationKind::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case ActivationKind::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::relu: return z > 0.0 ? 1.0 : 0.0;
  }
  throw std::logic_error("activate_derivative: bad kind");
}

std::string_view activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::relu: return "relu";
  }
  return "?";
}

std::string_view loss_name(LossKind kind) {
  return kind == LossKind::mse ? "mse" : "bce";
}

void validate_network(const NetworkParams& params) {
  if (params.layers.empty()) {
    throw std::invalid_argument("network: no layers");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    if (layer.b.size() != layer.W.rows) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " bias length does not match weight rows");
    }
    if (l > 0 && layer.in_dim() != params.layers[l - 1].out_dim()) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " input dim does not match previous output dim");
    }
  }
}

RealVec layer_forward(const LayerParams& layer, const RealVec& y_prev) {
  RealVec z = matvec(layer.W, y_prev);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.b[i];
  for (auto& v : z) v = activate(layer.activation, v);
  return z;
}

namespace {

// effective parameters of one layer under an optional weight mask
struct EffectiveLayer {
  const RealMat* W;
  RealVec b;
  RealMat masked_W;  // storage when a weight mask applies
};

EffectiveLayer effective_layer(const LayerParams& layer, const LayerMask* mask) {
  EffectiveLayer eff;
  if (mask != nullptr && mask->weights.rows > 0) {
    const RealMat& R = mask->weights;
    if (R.rows != layer.out_dim() || R.cols != layer.in_dim() + 1) {
      throw std::invalid_argument("forward: weight mask shape mismatch");
    }
    eff.masked_W = RealMat(layer.W.rows, layer.W.cols);
    for (std::size_t i = 0; i < layer.W.rows; ++i)
      for (std::size_t j = 0; j < layer.W.cols; ++j)
        eff.masked_W.at(i, j) = R.at(i, j) * layer.W.at(i, j);
    eff.b.resize(layer.b.size());
    for (std::size_t i = 0; i < layer.b.size(); ++i)
      eff.b[i] = R.at(i, layer.W.cols) * layer.b[i];
    eff.W = &eff.masked_W;
  } else {
    eff.W = &layer.W;
    eff.b = layer.b;
  }
  return eff;
}

}  // namespace

ForwardTrace forward(const NetworkParams& params, const RealVec& x,
                     const MaskSet& masks) {
  validate_network(params);
  if (x.size() != params.input_dim()) {
    throw std::invalid_argument("forward: input length " + std::to_string(x.size()) +
                                " does not match network input dim " +
                                std::to_string(params.input_dim()));
  }
  if (!masks.empty() && masks.size() != params.layers.size()) {
    throw std::invalid_argument("forward: mask set size does not match layer count");
  }

  ForwardTrace trace;
  trace.inputs.reserve(params.layers.size());
  trace.pre.reserve(params.layers.size());
  trace.act.reserve(params.layers.size());

  RealVec y = x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    const LayerMask* mask = masks.empty() ? nullptr : &masks[l];

    RealVec in = y;
    if (mask != nullptr && !mask->input.empty()) {
      in = hadamard(mask->input, in);
    }

    const EffectiveLayer eff = effective_layer(layer, mask);
    RealVec z = matvec(*eff.W, in);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += eff.b[i];

    RealVec a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = activate(layer.activation, z[i]);

    trace.inputs.push_back(std::move(in));
    trace.pre.push_back(std::move(z));
    trace.act.push_back(a);
    y = std::move(a);
  }
  return trace;
}

double loss(LossKind kind, const RealVec& pred, const RealVec& target) {
  if (pred.size() != target.size()) {
    throw std::invalid_argument("loss: prediction/target length mismatch (" +
                                std::to_string(pred.size()) + " vs " +
                                std::to_string(target.size()) + ")");
  }
  if (pred.empty()) throw std::invalid_argument("loss: empty vectors");

  const double k = static_cast<double>(pred.size());
  double acc = 0.0;
  switch (kind) {
    case LossKind::mse:
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
      }
      return acc / k;
    case LossKind::bce:
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(target[i] >= 0.0 && target[i] <= 1.0)) {
          throw std::invalid_argument("loss: bce target outside [0, 1]");
        }
        const double q = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
        acc -= target[i] * std::log(q) + (1.0 - target[i]) * std::log(1.0 - q);
      }
      return acc / k;
  }
  throw std::logic_error("loss: bad kind");
}

namespace {

// dL/dpred; the clamped region of bce is locally constant, derivative 0
RealVec loss_gradient(LossKind kind, const RealVec& pred, const RealVec& target) {
  const double k = static_cast<double>(pred.size());
  RealVec g(pred.size());
  switch (kind) {
    case LossKind::mse:
      for (std::size_t i = 0; i < pred.size(); ++i)
        g[i] = 2.0 * (pred[i] - target[i]) / k;
      break;
    case LossKind::bce:
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] <= kBceClamp || pred[i] >= 1.0 - kBceClamp) {
          g[i] = 0.0;
        } else {
          g[i] = -(target[i] / pred[i] - (1.0 - target[i]) / (1.0 - pred[i])) / k;
        }
      }
      break;
  }
  return g;
}

}  // namespace

ParamGradient zero_gradient(const NetworkParams& params) {
  ParamGradient grad;
  grad.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    grad.layers.push_back({RealMat(layer.W.rows, layer.W.cols), RealVec(layer.b.size(), 0.0)});
  }
  return grad;
}

ParamGradient backward(const NetworkParams& params, const RealVec& x,
                       const RealVec& target, LossKind kind,
                       const MaskSet& masks) {
  const ForwardTrace trace = forward(params, x, masks);
  if (target.size() != params.output_dim()) {
    throw std::invalid_argument("backward: target length does not match output dim");
  }

  ParamGradient grad = zero_gradient(params);
  const std::size_t n_layers = params.layers.size();

  RealVec dpred = loss_gradient(kind, trace.prediction(), target);
  RealVec delta(dpred.size());
  {
    const auto& pre = trace.pre.back();
    const auto act = params.layers.back().activation;
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] = dpred[i] * activate_derivative(act, pre[i]);
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const auto& layer = params.layers[l];
    const LayerMask* mask = masks.empty() ? nullptr : &masks[l];
    const bool weight_masked = mask != nullptr && mask->weights.rows > 0;
    const RealVec& in = trace.inputs[l];

    auto& lg = grad.layers[l];
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      const double w_scale = delta[i];
      for (std::size_t j = 0; j < layer.in_dim(); ++j) {
        double g = w_scale * in[j];
        if (weight_masked) g *= mask->weights.at(i, j);
        lg.dW.at(i, j) = g;
      }
      lg.db[i] = weight_masked ? w_scale * mask->weights.at(i, layer.in_dim()) : w_scale;
    }

    if (l == 0) break;

    // propagate through the (masked) weights, the input mask, and f'
    const EffectiveLayer eff = effective_layer(layer, mask);
    RealVec dy(layer.in_dim(), 0.0);
    for (std::size_t j = 0; j < layer.in_dim(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.out_dim(); ++i)
        acc += eff.W->at(i, j) * delta[i];
      dy[j] = acc;
    }
    if (mask != nullptr && !mask->input.empty()) {
      for (std::size_t j = 0; j < dy.size(); ++j) dy[j] *= mask->input[j];
    }

    const auto& pre_prev = trace.pre[l - 1];
    const auto act_prev = params.layers[l - 1].activation;
    delta.assign(dy.size(), 0.0);
    for (std::size_t j = 0; j < dy.size(); ++j)
      delta[j] = dy[j] * activate_derivative(act_prev, pre_prev[j]);
  }

  return grad;
}

RealVec flatten_params(const NetworkParams& params) {
  RealVec flat;
  flat.reserve(param_count(params));
  for (const auto& layer : params.layers) {
    flat.insert(flat.end(), layer.W.data.begin(), layer.W.data.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

std::size_t param_count(const NetworkParams& params) {
  std::size_t n = 0;
  for (const auto& layer : params.layers) n += layer.W.data.size() + layer.b.size();
  return n;
}

namespace {

struct LossEval {
  double value = 0.0;
  double min_relu_pre = std::numeric_limits<double>::infinity();
};

LossEval eval_loss_tracking_relu(const NetworkParams& params, const RealVec& x,
                                 const RealVec& target, LossKind kind) {
  const ForwardTrace trace = forward(params, x);
  LossEval out;
  out.value = loss(kind, trace.prediction(), target);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    if (params.layers[l].activation != ActivationKind::relu) continue;
    for (double z : trace.pre[l]) {
      out.min_relu_pre = std::min(out.min_relu_pre, std::abs(z));
    }
  }
  return out;
}

double* param_slot(NetworkParams& params, std::size_t index) {
  for (auto& layer : params.layers) {
    if (index < layer.W.data.size()) return &layer.W.data[index];
    index -= layer.W.data.size();
    if (index < layer.b.size()) return &layer.b[index];
    index -= layer.b.size();
  }
  return nullptr;
}

}  // namespace

double grad_check(const NetworkParams& params, const RealVec& x,
                  const RealVec& target, LossKind kind) {
  const ParamGradient analytic = backward(params, x, target, kind);
  RealVec flat_analytic;
  for (const auto& lg : analytic.layers) {
    flat_analytic.insert(flat_analytic.end(), lg.dW.data.begin(), lg.dW.data.end());
    flat_analytic.insert(flat_analytic.end(), lg.db.begin(), lg.db.end());
  }

  constexpr double h = 1e-5;
  constexpr double kink_margin = 1e-4;

  NetworkParams work = params;
  double max_rel = 0.0;
  for (std::size_t k = 0; k < flat_analytic.size(); ++k) {
    double* slot = param_slot(work, k);
    const double orig = *slot;

    *slot = orig + h;
    const LossEval plus = eval_loss_tracking_relu(work, x, target, kind);
    *slot = orig - h;
    const LossEval minus = eval_loss_tracking_relu(work, x, target, kind);
    *slot = orig;

    if (std::min(plus.min_relu_pre, minus.min_relu_pre) < kink_margin) continue;

    const double numeric = (plus.value - minus.value) / (2.0 * h);
    const double a = flat_analytic[k];
    const double rel =
        std::abs(a - numeric) / std::max(1e-12, std::abs(a) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

NetworkParams init_network(std::size_t input_dim,
                           const std::vector<LayerSpec>& topology,
                           RandomStream& stream) {
  if (topology.empty()) throw std::invalid_argument("init_network: empty topology");

  NetworkParams params;
  std::size_t in_dim = input_dim;
  for (const auto& spec : topology) {
    if (spec.units == 0) throw std::invalid_argument("init_network: zero-width layer");
    LayerParams layer;
    layer.W = RealMat(spec.units, in_dim);
    const double s = std::sqrt(6.0 / static_cast<double>(in_dim + spec.units));
    for (auto& w : layer.W.data) w = stream.next_uniform(-s, s);
    layer.b = RealVec(spec.units, 0.0);
    layer.activation = spec.activation;
    params.layers.push_back(std::move(layer));
    in_dim = spec.units;
  }
  return params;
}

}  // namespace reglab

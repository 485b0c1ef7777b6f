#include "reglab/augment.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace reglab {

std::vector<std::string> NoiseSpec::validate() const {
  std::vector<std::string> warnings;
  if (mode == NoiseMode::multiplicative && dist.kind == DistSpec::Kind::gaussian &&
      dist.a != 1.0) {
    warnings.push_back("multiplicative gaussian noise with mean " +
                       std::to_string(dist.a) +
                       " biases the expected sample; mean 1 keeps E[x_hat] = x");
  }
  return warnings;
}

std::string noise_describe(const NoiseSpec& spec) {
  return std::string(spec.mode == NoiseMode::additive ? "additive " : "multiplicative ") +
         dist_describe(spec.dist);
}

Decoder Decoder::identity(std::size_t dim) {
  Decoder d;
  d.kind = Kind::identity;
  d.dim = dim;
  return d;
}

Decoder Decoder::linear(RealMat A, RealVec c) {
  if (A.rows != c.size()) {
    throw std::invalid_argument("decoder: offset length does not match rows of A");
  }
  Decoder d;
  d.kind = Kind::linear;
  d.A = std::move(A);
  d.c = std::move(c);
  return d;
}

Decoder Decoder::linear_nonlinear(RealMat A, RealVec c, ActivationKind activation) {
  Decoder d = linear(std::move(A), std::move(c));
  d.kind = Kind::linear_nonlinear;
  d.activation = activation;
  return d;
}

Decoder Decoder::composed(std::vector<Decoder> stages) {
  if (stages.empty()) throw std::invalid_argument("decoder: empty composition");
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (stages[i].feature_dim() != stages[i - 1].input_dim()) {
      throw std::invalid_argument("decoder: stage " + std::to_string(i) +
                                  " dimension mismatch in composition");
    }
  }
  Decoder d;
  d.kind = Kind::composed;
  d.stages = std::move(stages);
  return d;
}

std::size_t Decoder::feature_dim() const {
  switch (kind) {
    case Kind::identity: return dim;
    case Kind::linear:
    case Kind::linear_nonlinear: return A.cols;
    case Kind::composed: return stages.front().feature_dim();
  }
  return 0;
}

std::size_t Decoder::input_dim() const {
  switch (kind) {
    case Kind::identity: return dim;
    case Kind::linear:
    case Kind::linear_nonlinear: return A.rows;
    case Kind::composed: return stages.back().input_dim();
  }
  return 0;
}

RealVec decode(const Decoder& d, const RealVec& z_hat) {
  if (z_hat.size() != d.feature_dim()) {
    throw std::invalid_argument("decode: feature length " + std::to_string(z_hat.size()) +
                                " does not match decoder feature dim " +
                                std::to_string(d.feature_dim()));
  }
  switch (d.kind) {
    case Decoder::Kind::identity: return z_hat;
    case Decoder::Kind::linear: return vec_add(matvec(d.A, z_hat), d.c);
    case Decoder::Kind::linear_nonlinear: {
      RealVec out = vec_add(matvec(d.A, z_hat), d.c);
      for (auto& v : out) v = activate(d.activation, v);
      return out;
    }
    case Decoder::Kind::composed: {
      RealVec out = z_hat;
      for (const auto& stage : d.stages) out = decode(stage, out);
      return out;
    }
  }
  throw std::logic_error("decode: bad kind");
}

std::string decoder_describe(const Decoder& d) {
  switch (d.kind) {
    case Decoder::Kind::identity:
      return "identity(" + std::to_string(d.dim) + ")";
    case Decoder::Kind::linear:
      return "linear(" + std::to_string(d.A.cols) + "->" + std::to_string(d.A.rows) + ")";
    case Decoder::Kind::linear_nonlinear:
      return "linear_nonlinear(" + std::to_string(d.A.cols) + "->" +
             std::to_string(d.A.rows) + "," + std::string(activation_name(d.activation)) +
             ")";
    case Decoder::Kind::composed: {
      std::string out = "composed[";
      for (std::size_t i = 0; i < d.stages.size(); ++i) {
        if (i > 0) out += ",";
        out += decoder_describe(d.stages[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

RealVec noise_additive(const RealVec& x, const RealVec& r) {
  if (x.size() != r.size()) {
    throw std::invalid_argument("noise_additive: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(r.size()) + ")");
  }
  return vec_add(x, r);
}

RealVec noise_multiplicative(const RealVec& x, const RealVec& r) {
  if (x.size() != r.size()) {
    throw std::invalid_argument("noise_multiplicative: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(r.size()) + ")");
  }
  return hadamard(r, x);
}

AugmentedSample augment_feature_additive(const RealVec& z, const DistSpec& noise_dist,
                                         const Decoder& d, RandomStream& stream,
                                         std::size_t origin_index) {
  const RealVec r = sample(noise_dist, z.size(), stream);
  AugmentedSample out;
  out.z_hat = noise_additive(z, r);
  out.x_hat = decode(d, out.z_hat);
  out.origin_index = origin_index;
  out.provenance = "additive " + dist_describe(noise_dist) + " on feature via " +
                   decoder_describe(d);
  return out;
}

AugmentedSample augment_feature_multiplicative(const RealVec& z, const DistSpec& noise_dist,
                                               const Decoder& d, RandomStream& stream,
                                               std::size_t origin_index) {
  const RealVec r = sample(noise_dist, z.size(), stream);
  AugmentedSample out;
  out.z_hat = noise_multiplicative(z, r);
  out.x_hat = decode(d, out.z_hat);
  out.origin_index = origin_index;
  out.provenance = "multiplicative " + dist_describe(noise_dist) + " on feature via " +
                   decoder_describe(d);
  return out;
}

RealVec label_smooth(const RealVec& y, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("label_smooth: epsilon must be in [0, 1)");
  }
  if (y.size() < 2) {
    throw std::invalid_argument("label_smooth: need at least 2 label components");
  }
  double sum = 0.0;
  for (double v : y) sum += v;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("label_smooth: label vector must sum to 1");
  }
  const double k = static_cast<double>(y.size());
  RealVec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = (1.0 - epsilon) * y[i] + epsilon / k;
  }
  return out;
}

AugmentedSample augment_row(const Row& row, const AugmentSpec& spec,
                            RandomStream& stream, std::size_t origin_index) {
  const bool additive = spec.noise.mode == NoiseMode::additive;
  switch (spec.target) {
    case AugmentTarget::input: {
      const RealVec r = sample(spec.noise.dist, row.x.size(), stream);
      AugmentedSample out;
      out.x_hat = additive ? noise_additive(row.x, r) : noise_multiplicative(row.x, r);
      out.z_hat = row.z;
      out.y_hat = row.y;
      out.origin_index = origin_index;
      out.provenance = noise_describe(spec.noise) + " on input";
      return out;
    }
    case AugmentTarget::feature: {
      if (!spec.decoder.has_value()) {
        throw std::invalid_argument("augment: feature target requires a decoder");
      }
      if (row.z.empty()) {
        throw std::invalid_argument("augment: feature target requires a feature block");
      }
      AugmentedSample out =
          additive
              ? augment_feature_additive(row.z, spec.noise.dist, *spec.decoder, stream,
                                         origin_index)
              : augment_feature_multiplicative(row.z, spec.noise.dist, *spec.decoder,
                                               stream, origin_index);
      out.y_hat = row.y;
      return out;
    }
    case AugmentTarget::label: {
      const RealVec r = sample(spec.noise.dist, row.y.size(), stream);
      AugmentedSample out;
      out.x_hat = row.x;
      out.z_hat = row.z;
      out.y_hat = additive ? noise_additive(row.y, r) : noise_multiplicative(row.y, r);
      out.origin_index = origin_index;
      out.provenance = noise_describe(spec.noise) + " on label";
      return out;
    }
  }
  throw std::logic_error("augment_row: bad target");
}

std::vector<AugmentedSample> generate_batch(const Dataset& dataset,
                                            const AugmentSpec& spec,
                                            std::size_t count, RandomStream& stream) {
  if (spec.target == AugmentTarget::feature) {
    if (!spec.decoder.has_value()) {
      throw std::invalid_argument("generate_batch: feature target requires a decoder");
    }
    if (dataset.feature_dim() == 0) {
      throw std::invalid_argument("generate_batch: dataset has no feature block");
    }
  }
  const auto train = dataset.train_indices();
  if (count > 0 && train.empty()) {
    throw std::invalid_argument("generate_batch: empty train split");
  }

  std::vector<AugmentedSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t origin = train[i % train.size()];
    out.push_back(augment_row(dataset.rows[origin], spec, stream, origin));
  }
  return out;
}

namespace {

struct Moments {
  RealVec mean;
  RealMat cov;  // population covariance
  std::size_t n = 0;
};

Moments pool_equal_blocks(const std::vector<Moments>& blocks, std::size_t dim);

Moments compute_moments(const std::vector<const RealVec*>& xs) {
  Moments m;
  m.n = xs.size();
  const std::size_t dim = xs.front()->size();
  m.mean.assign(dim, 0.0);
  for (const auto* x : xs) {
    for (std::size_t d = 0; d < dim; ++d) m.mean[d] += (*x)[d];
  }
  for (auto& v : m.mean) v /= static_cast<double>(m.n);

  m.cov = RealMat(dim, dim);
  for (const auto* x : xs) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = (*x)[i] - m.mean[i];
      for (std::size_t j = i; j < dim; ++j) {
        m.cov.at(i, j) += di * ((*x)[j] - m.mean[j]);
      }
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      m.cov.at(i, j) /= static_cast<double>(m.n);
      m.cov.at(j, i) = m.cov.at(i, j);
    }
  }
  return m;
}

// Equal-sized blocks pool exactly: mean of block means, mean of block
// covariances plus the population covariance of the block means. Welford
// updates keep identical blocks identical to a single block.
Moments pool_equal_blocks(const std::vector<Moments>& blocks, std::size_t dim) {
  Moments pooled;
  pooled.mean.assign(dim, 0.0);
  RealMat within(dim, dim);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const double inv = 1.0 / static_cast<double>(b + 1);
    for (std::size_t d = 0; d < dim; ++d) {
      pooled.mean[d] += (blocks[b].mean[d] - pooled.mean[d]) * inv;
    }
    for (std::size_t i = 0; i < dim * dim; ++i) {
      within.data[i] += (blocks[b].cov.data[i] - within.data[i]) * inv;
    }
  }

  RealMat between(dim, dim);
  for (const auto& block : blocks) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = block.mean[i] - pooled.mean[i];
      for (std::size_t j = 0; j < dim; ++j) {
        between.at(i, j) += di * (block.mean[j] - pooled.mean[j]);
      }
    }
  }

  pooled.cov = RealMat(dim, dim);
  const double inv_k = 1.0 / static_cast<double>(blocks.size());
  for (std::size_t i = 0; i < dim * dim; ++i) {
    pooled.cov.data[i] = within.data[i] + between.data[i] * inv_k;
  }
  return pooled;
}

}  // namespace

SchemeCheckReport scheme_check(const Dataset& original, const AugmentSpec& generator,
                               std::size_t n_samples_per_class,
                               const SchemeTolerances& tol, RandomStream& stream) {
  if (n_samples_per_class < 100) {
    throw std::invalid_argument("scheme_check: need at least 100 samples per class");
  }
  if (original.rows.empty()) {
    throw std::invalid_argument("scheme_check: empty class (no rows)");
  }

  // classes keyed by exact label vector
  std::map<RealVec, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < original.rows.size(); ++i) {
    classes[original.rows[i].y].push_back(i);
  }

  SchemeCheckReport report;
  report.tol_mean = tol.mean_se_units;
  report.tol_cov = tol.cov_se_units;
  report.n_classes = classes.size();
  report.n_original = original.rows.size();

  constexpr double kSeFloor = 1e-30;

  for (const auto& [label, members] : classes) {
    const std::size_t class_size = members.size();
    // Every original is augmented equally often, one full pass per block, and
    // block moments are pooled by the law of total variance. An identity
    // generator then reproduces the class moments bit-for-bit.
    const std::size_t copies = (n_samples_per_class + class_size - 1) / class_size;

    std::vector<const RealVec*> orig_ptrs;
    for (std::size_t idx : members) orig_ptrs.push_back(&original.rows[idx].x);
    const Moments mo = compute_moments(orig_ptrs);
    const std::size_t dim = mo.mean.size();

    std::vector<Moments> blocks;
    blocks.reserve(copies);
    for (std::size_t c = 0; c < copies; ++c) {
      std::vector<RealVec> block;
      block.reserve(class_size);
      for (std::size_t idx : members) {
        block.push_back(augment_row(original.rows[idx], generator, stream, idx).x_hat);
      }
      std::vector<const RealVec*> ptrs;
      for (const auto& x : block) ptrs.push_back(&x);
      blocks.push_back(compute_moments(ptrs));
    }
    report.n_augmented += copies * class_size;

    Moments ma = pool_equal_blocks(blocks, dim);
    ma.n = copies * class_size;

    for (std::size_t d = 0; d < dim; ++d) {
      const double se = std::sqrt(mo.cov.at(d, d) / static_cast<double>(mo.n) +
                                  ma.cov.at(d, d) / static_cast<double>(ma.n));
      const double z = std::abs(ma.mean[d] - mo.mean[d]) / std::max(se, kSeFloor);
      report.mean_discrepancy = std::max(report.mean_discrepancy, z);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i; j < dim; ++j) {
        // normal-approximation variance of the sample covariance
        const double vo = (mo.cov.at(i, i) * mo.cov.at(j, j) +
                           mo.cov.at(i, j) * mo.cov.at(i, j)) /
                          static_cast<double>(mo.n);
        const double va = (ma.cov.at(i, i) * ma.cov.at(j, j) +
                           ma.cov.at(i, j) * ma.cov.at(i, j)) /
                          static_cast<double>(ma.n);
        const double se = std::sqrt(vo + va);
        const double z =
            std::abs(ma.cov.at(i, j) - mo.cov.at(i, j)) / std::max(se, kSeFloor);
        report.cov_discrepancy = std::max(report.cov_discrepancy, z);
      }
    }
  }

  report.mean_pass = report.mean_discrepancy <= report.tol_mean;
  report.cov_pass = report.cov_discrepancy <= report.tol_cov;
  report.pass = report.mean_pass && report.cov_pass;
  return report;
}

}  // namespace reglab

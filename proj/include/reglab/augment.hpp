#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reglab/dataset.hpp"
#include "reglab/net.hpp"
#include "reglab/numkit.hpp"

namespace reglab {

enum class NoiseMode { additive, multiplicative };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::additive;
  DistSpec dist;

  // non-fatal issues, e.g. multiplicative gaussian noise whose mean is not 1
  std::vector<std::string> validate() const;

  bool operator==(const NoiseSpec&) const = default;
};

std::string noise_describe(const NoiseSpec& spec);

// A known, deterministic transformation from feature vectors to inputs.
struct Decoder {
  enum class Kind { identity, linear, linear_nonlinear, composed };

  Kind kind = Kind::identity;
  std::size_t dim = 0;  // identity only
  RealMat A;
  RealVec c;
  ActivationKind activation = ActivationKind::identity;
  std::vector<Decoder> stages;

  static Decoder identity(std::size_t dim);
  static Decoder linear(RealMat A, RealVec c);
  static Decoder linear_nonlinear(RealMat A, RealVec c, ActivationKind activation);
  static Decoder composed(std::vector<Decoder> stages);

  std::size_t feature_dim() const;
  std::size_t input_dim() const;

  bool operator==(const Decoder&) const = default;
};

RealVec decode(const Decoder& d, const RealVec& z_hat);
std::string decoder_describe(const Decoder& d);

struct AugmentedSample {
  RealVec x_hat;
  RealVec z_hat;  // noised feature block, empty when not applicable
  RealVec y_hat;  // label the sample trains with
  std::size_t origin_index = 0;
  std::string provenance;

  bool operator==(const AugmentedSample&) const = default;
};

RealVec noise_additive(const RealVec& x, const RealVec& r);
RealVec noise_multiplicative(const RealVec& x, const RealVec& r);

// x_hat = d(z + r), r drawn from noise_dist
AugmentedSample augment_feature_additive(const RealVec& z, const DistSpec& noise_dist,
                                         const Decoder& d, RandomStream& stream,
                                         std::size_t origin_index = 0);
// x_hat = d(r * z)
AugmentedSample augment_feature_multiplicative(const RealVec& z, const DistSpec& noise_dist,
                                               const Decoder& d, RandomStream& stream,
                                               std::size_t origin_index = 0);

// (1 - epsilon) * y + epsilon / K; y must sum to 1 and have K >= 2
RealVec label_smooth(const RealVec& y, double epsilon);

enum class AugmentTarget { input, feature, label };

struct AugmentSpec {
  NoiseSpec noise;
  AugmentTarget target = AugmentTarget::input;
  std::optional<Decoder> decoder;  // required for feature targets

  bool operator==(const AugmentSpec&) const = default;
};

// One augmented sample from one source row.
AugmentedSample augment_row(const Row& row, const AugmentSpec& spec,
                            RandomStream& stream, std::size_t origin_index);

// `count` samples cycling over the dataset's train rows in order.
std::vector<AugmentedSample> generate_batch(const Dataset& dataset,
                                            const AugmentSpec& spec,
                                            std::size_t count, RandomStream& stream);

struct SchemeTolerances {
  // tolerances are in units of the estimator's standard error
  double mean_se_units = 4.0;
  double cov_se_units = 4.0;
};

struct SchemeCheckReport {
  double mean_discrepancy = 0.0;  // max standardized |delta mean| over classes/dims
  double cov_discrepancy = 0.0;   // max standardized |delta cov| over classes/entries
  double tol_mean = 4.0;
  double tol_cov = 4.0;
  bool mean_pass = true;
  bool cov_pass = true;
  bool pass = true;
  std::size_t n_classes = 0;
  std::size_t n_original = 0;
  std::size_t n_augmented = 0;
};

// Moment check of the augmentation-scheme condition: compares per-class
// empirical means and covariances of augmented vs original data. Each
// original row is augmented the same number of times so an identity
// generator reproduces the moments exactly.
SchemeCheckReport scheme_check(const Dataset& original, const AugmentSpec& generator,
                               std::size_t n_samples_per_class,
                               const SchemeTolerances& tol, RandomStream& stream);

}  // namespace reglab

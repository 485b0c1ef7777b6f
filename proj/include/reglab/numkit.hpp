#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace reglab {

using RealVec = std::vector<double>;

// Dense row-major matrix. Small sizes only; no BLAS, no views.
struct RealMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMat() = default;
  RealMat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static RealMat identity(std::size_t n);
  static RealMat from_rows(const std::vector<RealVec>& rows);

  bool operator==(const RealMat&) const = default;
};

RealVec hadamard(const RealVec& a, const RealVec& b);
RealMat mat_hadamard(const RealMat& a, const RealMat& b);
RealVec matvec(const RealMat& a, const RealVec& v);
double l1_norm(const RealVec& v);
double l2_norm_sq(const RealVec& v);

RealVec vec_add(const RealVec& a, const RealVec& b);
RealVec vec_scale(const RealVec& v, double c);
double dot(const RealVec& a, const RealVec& b);

struct DistSpec {
  enum class Kind { gaussian, bernoulli, uniform };

  Kind kind = Kind::gaussian;
  double a = 0.0;  // mean | p | lo
  double b = 0.0;  // stddev | unused | hi

  static DistSpec gaussian(double mean, double stddev);
  static DistSpec bernoulli(double p);
  static DistSpec uniform(double lo, double hi);

  bool operator==(const DistSpec&) const = default;
};

std::string dist_describe(const DistSpec& dist);

// Deterministic random stream: xoshiro256++ with splitmix64 seeding.
// The same seed always yields the same sequence of draws. Child streams
// are derived from the root seed and a label, so split("x") on equal
// streams gives equal children. Gaussian draws use the Marsaglia polar
// method (spare value discarded).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();
  std::uint64_t next_below(std::uint64_t bound);  // unbiased, bound > 0
  double next_uniform();                          // [0, 1)
  double next_uniform(double lo, double hi);
  double next_gaussian(double mean, double stddev);
  double next_bernoulli(double p);  // 0.0 or 1.0

  RandomStream split(std::string_view label) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

RealVec sample(const DistSpec& dist, std::size_t n, RandomStream& stream);

}  // namespace reglab

#include "reglab/numkit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace reglab {

namespace {

void require_same_length(const RealVec& a, const RealVec& b, const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

RealMat RealMat::identity(std::size_t n) {
  RealMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

RealMat RealMat::from_rows(const std::vector<RealVec>& rows) {
  if (rows.empty()) return RealMat();
  RealMat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) {
      throw std::invalid_argument("from_rows: ragged rows");
    }
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

RealVec hadamard(const RealVec& a, const RealVec& b) {
  require_same_length(a, b, "hadamard");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

RealMat mat_hadamard(const RealMat& a, const RealMat& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw std::invalid_argument("mat_hadamard: shape mismatch (" +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols) + ")");
  }
  RealMat out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

RealVec matvec(const RealMat& a, const RealVec& v) {
  if (a.cols != v.size()) {
    throw std::invalid_argument("matvec: dimension mismatch (cols " +
                                std::to_string(a.cols) + " vs len " +
                                std::to_string(v.size()) + ")");
  }
  RealVec out(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += a.at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double l1_norm(const RealVec& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

double l2_norm_sq(const RealVec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

RealVec vec_add(const RealVec& a, const RealVec& b) {
  require_same_length(a, b, "vec_add");
  RealVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RealVec vec_scale(const RealVec& v, double c) {
  RealVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

double dot(const RealVec& a, const RealVec& b) {
  require_same_length(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

DistSpec DistSpec::gaussian(double mean, double stddev) {
  if (!(stddev >= 0.0)) {
    throw std::invalid_argument("gaussian: stddev must be >= 0");
  }
  return DistSpec{Kind::gaussian, mean, stddev};
}

DistSpec DistSpec::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bernoulli: p must be in [0, 1]");
  }
  return DistSpec{Kind::bernoulli, p, 0.0};
}

DistSpec DistSpec::uniform(double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("uniform: lo must be <= hi");
  }
  return DistSpec{Kind::uniform, lo, hi};
}

std::string dist_describe(const DistSpec& dist) {
  char buf[96];
  switch (dist.kind) {
    case DistSpec::Kind::gaussian:
      std::snprintf(buf, sizeof(buf), "gaussian(mean=%g,stddev=%g)", dist.a, dist.b);
      break;
    case DistSpec::Kind::bernoulli:
      std::snprintf(buf, sizeof(buf), "bernoulli(p=%g)", dist.a);
      break;
    case DistSpec::Kind::uniform:
      std::snprintf(buf, sizeof(buf), "uniform(lo=%g,hi=%g)", dist.a, dist.b);
      break;
  }
  return buf;
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t RandomStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
  // rejection sampling to avoid modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double RandomStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_uniform();
}

double RandomStream::next_gaussian(double mean, double stddev) {
  double u, v, s;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return mean + stddev * (u * std::sqrt(-2.0 * std::log(s) / s));
}

double RandomStream::next_bernoulli(double p) {
  return next_uniform() < p ? 1.0 : 0.0;
}

RandomStream RandomStream::split(std::string_view label) const {
  // child seed depends only on (root seed, label)
  std::uint64_t mixed = seed_ ^ fnv1a64(label);
  std::uint64_t x = mixed;
  return RandomStream(splitmix64(x));
}

RealVec sample(const DistSpec& dist, std::size_t n, RandomStream& stream) {
  RealVec out(n);
  switch (dist.kind) {
    case DistSpec::Kind::gaussian:
      for (auto& x : out) x = stream.next_gaussian(dist.a, dist.b);
      break;
    case DistSpec::Kind::bernoulli:
      for (auto& x : out) x = stream.next_bernoulli(dist.a);
      break;
    case DistSpec::Kind::uniform:
      for (auto& x : out) x = stream.next_uniform(dist.a, dist.b);
      break;
  }
  return out;
}

}  // namespace reglab

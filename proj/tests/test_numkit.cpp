#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "reglab/numkit.hpp"

using namespace reglab;

TEST_CASE("hadamard multiplies elementwise") {
  CHECK(hadamard({1, 2, 3}, {4, 5, 6}) == RealVec{4, 10, 18});
  CHECK(hadamard({1, 2}, {1, 1}) == RealVec{1, 2});
  CHECK(hadamard({1, 2}, {0, 0}) == RealVec{0, 0});
  CHECK_THROWS_AS(hadamard({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("hadamard algebra") {
  RandomStream stream(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + stream.next_below(8);
    RealVec a(n), b(n), c(n), ones(n, 1.0);
    for (auto& v : a) v = stream.next_uniform(-3, 3);
    for (auto& v : b) v = stream.next_uniform(-3, 3);
    for (auto& v : c) v = stream.next_uniform(-3, 3);
    CHECK(hadamard(a, b) == hadamard(b, a));  // commutes bit-exactly
    const RealVec left = hadamard(hadamard(a, b), c);
    const RealVec right = hadamard(a, hadamard(b, c));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(left[i] == doctest::Approx(right[i]).epsilon(1e-14));
    }
    CHECK(hadamard(a, ones) == a);
  }
}

TEST_CASE("mat_hadamard masks elementwise") {
  const RealMat a = RealMat::from_rows({{1, 2}, {3, 4}});
  CHECK(mat_hadamard(a, RealMat(2, 2, 1.0)) == a);
  CHECK(mat_hadamard(a, RealMat::from_rows({{0, 1}, {1, 0}})) ==
        RealMat::from_rows({{0, 2}, {3, 0}}));
  CHECK(mat_hadamard(a, RealMat(2, 2, 0.0)) == RealMat(2, 2, 0.0));
  CHECK_THROWS_AS(mat_hadamard(a, RealMat(2, 3)), std::invalid_argument);
}

TEST_CASE("matvec") {
  CHECK(matvec(RealMat::identity(2), {5, 7}) == RealVec{5, 7});
  CHECK(matvec(RealMat::from_rows({{1, 1}, {1, -1}}), {2, 1}) == RealVec{3, 1});
  CHECK(matvec(RealMat(3, 2, 0.0), {1, 2}) == RealVec{0, 0, 0});
  CHECK_THROWS_AS(matvec(RealMat(2, 2), {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("norms") {
  CHECK(l1_norm({1, -2, 3}) == 6.0);
  CHECK(l1_norm({}) == 0.0);
  CHECK(l1_norm({0, 0}) == 0.0);
  CHECK(l2_norm_sq({1, -2, 3}) == 14.0);
  CHECK(l2_norm_sq({0}) == 0.0);
  CHECK(l2_norm_sq({3, 4}) == 25.0);
}

TEST_CASE("l1 triangle inequality and l2 scaling") {
  RandomStream stream(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + stream.next_below(10);
    RealVec a(n), b(n);
    for (auto& v : a) v = stream.next_uniform(-5, 5);
    for (auto& v : b) v = stream.next_uniform(-5, 5);
    CHECK(l1_norm(vec_add(a, b)) <= l1_norm(a) + l1_norm(b) + 1e-12);

    const double c = stream.next_uniform(-3, 3);
    CHECK(l2_norm_sq(vec_scale(a, c)) ==
          doctest::Approx(c * c * l2_norm_sq(a)).epsilon(1e-12));
  }
}

TEST_CASE("dist spec validation") {
  CHECK_THROWS_AS(DistSpec::bernoulli(1.5), std::invalid_argument);
  CHECK_THROWS_AS(DistSpec::bernoulli(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(DistSpec::gaussian(0, -1), std::invalid_argument);
  CHECK_THROWS_AS(DistSpec::uniform(2, 1), std::invalid_argument);
  CHECK(DistSpec::uniform(1, 1).a == 1.0);  // degenerate point mass allowed
}

TEST_CASE("degenerate distributions sample exactly") {
  RandomStream stream(3);
  CHECK(sample(DistSpec::bernoulli(1.0), 4, stream) == RealVec{1, 1, 1, 1});
  CHECK(sample(DistSpec::bernoulli(0.0), 4, stream) == RealVec{0, 0, 0, 0});
  CHECK(sample(DistSpec::gaussian(0.0, 0.0), 3, stream) == RealVec{0, 0, 0});
  CHECK(sample(DistSpec::uniform(2.5, 2.5), 2, stream) == RealVec{2.5, 2.5});
}

TEST_CASE("bernoulli concentration") {
  for (const double p : {0.1, 0.5, 0.9}) {
    RandomStream stream(101 + static_cast<std::uint64_t>(p * 10));
    const std::size_t n = 100000;
    const RealVec draws = sample(DistSpec::bernoulli(p), n, stream);
    double mean = 0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(n);
    const double bound = 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
    CHECK(std::abs(mean - p) <= bound);
  }
}

TEST_CASE("gaussian moments") {
  const double mu = 1.5, sigma = 2.0;
  RandomStream stream(55);
  const std::size_t n = 100000;
  const RealVec draws = sample(DistSpec::gaussian(mu, sigma), n, stream);
  double mean = 0;
  for (double d : draws) mean += d;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);

  CHECK(std::abs(mean - mu) <= 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sd - sigma) <= 4.0 * sigma / std::sqrt(2.0 * static_cast<double>(n)));
}

TEST_CASE("uniform range") {
  RandomStream stream(9);
  const RealVec draws = sample(DistSpec::uniform(-2.0, 3.0), 1000, stream);
  for (double d : draws) {
    CHECK(d >= -2.0);
    CHECK(d < 3.0);
  }
}

// Frozen reference sequence: any change to the generator algorithm must be
// deliberate, because recorded experiment seeds would stop reproducing.
TEST_CASE("reference sequence for seed 42") {
  const std::uint64_t expected[8] = {
      15021278609987233951ULL, 5881210131331364753ULL,  18149643915985481100ULL,
      12933668939759105464ULL, 14637574242682825331ULL, 10848501901068131965ULL,
      2312344417745909078ULL,  11162538943635311430ULL};
  RandomStream stream(42);
  for (const std::uint64_t want : expected) {
    CHECK(stream.next_u64() == want);
  }

  RandomStream uniforms(42);
  CHECK(uniforms.next_uniform() == 0.81430514512290986);
  CHECK(uniforms.next_uniform() == 0.31882104006166112);
  CHECK(uniforms.next_uniform() == 0.98389416817748876);
  CHECK(uniforms.next_uniform() == 0.70113559813475557);
}

TEST_CASE("identical seeds give identical sequences") {
  RandomStream a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("split children") {
  RandomStream root(77);
  RandomStream a1 = root.split("masks");
  RandomStream a2 = root.split("masks");
  RandomStream b = root.split("noise");

  bool differs_from_sibling = false;
  bool differs_from_parent = false;
  RandomStream parent(77);
  for (int i = 0; i < 16; ++i) {
    const std::uint64_t va = a1.next_u64();
    CHECK(va == a2.next_u64());
    if (va != b.next_u64()) differs_from_sibling = true;
    if (va != parent.next_u64()) differs_from_parent = true;
  }
  CHECK(differs_from_sibling);
  CHECK(differs_from_parent);
}

TEST_CASE("degenerate gaussians consume the stream like regular ones") {
  // replay schemes rely on sigma not changing how many draws a sample takes
  RandomStream zero_sigma(314), unit_sigma(314);
  sample(DistSpec::gaussian(5.0, 0.0), 16, zero_sigma);
  sample(DistSpec::gaussian(5.0, 2.0), 16, unit_sigma);
  for (int i = 0; i < 8; ++i) {
    CHECK(zero_sigma.next_u64() == unit_sigma.next_u64());
  }
}

TEST_CASE("next_below is in range and deterministic") {
  RandomStream a(5), b(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t bound = 1 + (static_cast<std::uint64_t>(i) % 17);
    const std::uint64_t v = a.next_below(bound);
    CHECK(v < bound);
    CHECK(v == b.next_below(bound));
  }
  CHECK_THROWS_AS(a.next_below(0), std::invalid_argument);
}

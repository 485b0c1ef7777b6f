#include "reglab/tasks.hpp"

#include <cmath>
#include <stdexcept>

namespace reglab::tasks {

LinregTask linreg2d_v1() {
  LinregTask task;
  task.true_weights = {2.0, -1.0};

  const std::vector<RealVec> base = {
      {1.0, 0.5}, {0.3, -1.2}, {-0.7, 0.9}, {1.5, 1.1}};
  for (const auto& x : base) {
    for (const double sign : {1.0, -1.0}) {
      Row row;
      row.x = vec_scale(x, sign);
      row.y = {dot(task.true_weights, row.x)};
      row.split = Split::train;
      task.data.rows.push_back(std::move(row));
    }
  }
  return task;
}

namespace {

// class-center direction for hier-z4x16-v1 (unit length)
RealVec hier_class_direction() {
  RealVec dir = {1.0, -0.8, 0.6, -0.4};
  const double norm = std::sqrt(l2_norm_sq(dir));
  for (auto& v : dir) v /= norm;
  return dir;
}

// cluster geometry: centers at +-offset along the direction, isotropic spread
constexpr double kHierOffset = 1.2;
constexpr double kHierSpread = 0.6;

}  // namespace

Decoder hier_z4x16_decoder() {
  // fixed coefficients: part of the task version, identical on every call
  RandomStream stream(0x48494552);  // "HIER"
  RealMat a(16, 4);
  for (auto& v : a.data) v = stream.next_uniform(-0.75, 0.75);
  RealVec c(16);
  for (auto& v : c) v = stream.next_uniform(-0.2, 0.2);
  return Decoder::linear_nonlinear(std::move(a), std::move(c), ActivationKind::tanh);
}

HierTask hier_z4x16_v1(std::uint64_t seed, std::size_t n_train, std::size_t n_domain) {
  if (n_train == 0 || n_train >= n_domain) {
    throw std::invalid_argument("hier-z4x16-v1: need 0 < n_train < n_domain");
  }
  HierTask task;
  task.decoder = hier_z4x16_decoder();

  const RealVec dir = hier_class_direction();
  RandomStream stream = RandomStream(seed).split("hier-z4x16-v1");
  task.data.rows.reserve(n_domain);
  for (std::size_t i = 0; i < n_domain; ++i) {
    const double label = stream.next_bernoulli(0.5);
    const double center = (2.0 * label - 1.0) * kHierOffset;
    Row row;
    row.z.resize(4);
    for (std::size_t d = 0; d < 4; ++d) {
      row.z[d] = center * dir[d] + stream.next_gaussian(0.0, kHierSpread);
    }
    row.x = decode(task.decoder, row.z);
    row.y = {label};
    row.split = i < n_train ? Split::train : Split::val;
    task.data.rows.push_back(std::move(row));
  }
  return task;
}

Dataset make_builtin(const std::string& name, std::uint64_t seed) {
  if (name == "linreg2d-v1") return linreg2d_v1().data;
  if (name == "hier-z4x16-v1") return hier_z4x16_v1(seed).data;
  throw std::invalid_argument("unknown builtin task: " + name);
}

bool is_builtin(const std::string& name) {
  return name == "linreg2d-v1" || name == "hier-z4x16-v1";
}

}  // namespace reglab::tasks

#pragma once

#include <cstdint>
#include <string>

#include "reglab/augment.hpp"
#include "reglab/dataset.hpp"

namespace reglab::tasks {

// Builtin synthetic tasks. Generators are versioned: a report produced from
// a config naming one of these is reproducible from the config alone.

struct LinregTask {
  Dataset data;
  RealVec true_weights;
};

// 2-d linear regression, y = w* . x on a fixed sign-symmetric design
// (zero-mean inputs, zero optimal bias). All rows are train rows.
LinregTask linreg2d_v1();

struct HierTask {
  Dataset data;
  Decoder decoder;
};

// Hierarchical task: z in R^4 drawn N(0,1), x = tanh(A z + c) in R^16 through
// a fixed affine+tanh decoder, binary label from the sign of u . z. The first
// n_train rows are tagged train, the rest val.
HierTask hier_z4x16_v1(std::uint64_t seed, std::size_t n_train = 32,
                       std::size_t n_domain = 2048);

Decoder hier_z4x16_decoder();

// Lookup by versioned name ("linreg2d-v1", "hier-z4x16-v1"); throws on
// unknown names. The seed is ignored by seedless generators.
Dataset make_builtin(const std::string& name, std::uint64_t seed);
bool is_builtin(const std::string& name);

}  // namespace reglab::tasks

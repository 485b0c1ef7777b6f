#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reglab/experiment.hpp"

namespace reglab {

// Named verification suites runnable from the CLI. Each run is deterministic
// under the given seed and returns one report per checked claim.
std::vector<std::string> verification_names();
bool is_verification(const std::string& name);
std::vector<EquivalenceReport> run_verification(const std::string& name,
                                                std::uint64_t seed);

}  // namespace reglab

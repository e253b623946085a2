#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cdolab/hjmm.hpp"

namespace cdolab {

struct BatchOptions {
    PathOptions path;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    bool coupled_loss = true;  // false: every path uses `fixed_loss`
    LossPath fixed_loss;
};

/// Path p uses path_seed(seed, p), so the batch does not depend on how paths
/// are spread over threads.
ScenarioResult run_one(const HjmmModel& model, const ForwardSurface& r0, const BatchOptions& opts, std::size_t p);

/// Reference loop, one path after another.
std::vector<ScenarioResult> run_batch_serial(const HjmmModel& model, const ForwardSurface& r0,
                                             const BatchOptions& opts);

/// Same results, paths spread over OpenMP threads. The first failing path (by
/// index) is rethrown.
std::vector<ScenarioResult> run_batch(const HjmmModel& model, const ForwardSurface& r0, const BatchOptions& opts);

}  // namespace cdolab

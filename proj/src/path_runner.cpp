#include "cdolab/path_runner.hpp"

#include <exception>

namespace cdolab {

ScenarioResult run_one(const HjmmModel& model, const ForwardSurface& r0, const BatchOptions& opts, std::size_t p) {
    const std::uint64_t seed = path_seed(opts.seed, p);
    if (opts.coupled_loss) return simulate_path(model, r0, opts.path, seed);
    return solve_path(model, r0, opts.fixed_loss, opts.path, seed);
}

std::vector<ScenarioResult> run_batch_serial(const HjmmModel& model, const ForwardSurface& r0,
                                             const BatchOptions& opts) {
    std::vector<ScenarioResult> out;
    out.reserve(opts.n_paths);
    for (std::size_t p = 0; p < opts.n_paths; ++p) out.push_back(run_one(model, r0, opts, p));
    return out;
}

std::vector<ScenarioResult> run_batch(const HjmmModel& model, const ForwardSurface& r0, const BatchOptions& opts) {
    std::vector<ScenarioResult> out(opts.n_paths);
    std::vector<std::exception_ptr> errors(opts.n_paths);
    const auto n = static_cast<std::ptrdiff_t>(opts.n_paths);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
        const auto idx = static_cast<std::size_t>(p);
        try {
            out[idx] = run_one(model, r0, opts, idx);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace cdolab

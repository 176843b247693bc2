#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "statarb/rng.hpp"

namespace statarb {

enum class ExecutionMode { Serial, Parallel };

// Runs `reps` independent replications of stat_fn and returns the results in
// replication order. Replication i always draws from derive_seed(seed, i),
// so Serial and Parallel produce bit-identical vectors; Parallel only changes
// which thread evaluates which index.
template <typename F>
std::vector<double> run_replications(std::int64_t reps, std::uint64_t seed, ExecutionMode mode,
                                     F&& stat_fn) {
    std::vector<double> out(static_cast<std::size_t>(reps));
    if (mode == ExecutionMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < reps; ++i)
            out[static_cast<std::size_t>(i)] = stat_fn(derive_seed(seed, static_cast<std::uint64_t>(i)));
    } else {
        for (std::int64_t i = 0; i < reps; ++i)
            out[static_cast<std::size_t>(i)] = stat_fn(derive_seed(seed, static_cast<std::uint64_t>(i)));
    }
    return out;
}

}  // namespace statarb

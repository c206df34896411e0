// Deterministic parallel execution of independent tasks plus the seed
// derivation used for parameter sweeps.  Results must not depend on the
// worker count: every task gets its own output slot and its own seed derived
// from (master seed, task identity) only.
#pragma once

#include "gn/types.hpp"

#include <cstdint>
#include <functional>

namespace gn {

// SplitMix64: a fixed, platform-independent 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for indexed sweep tasks: depends only on (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Seed for a (mu, g) parameter point: depends only on the bit patterns of the
// coordinates and the master seed, so identical points get identical seeds
// regardless of where they appear in a list.
std::uint64_t point_seed(std::uint64_t master, Real mu, Real g);

// Effective worker count: `requested` if >= 1, else the GN_WORKERS
// environment variable if set, else std::thread::hardware_concurrency().
int resolve_workers(int requested);

// Run fn(0..n-1) on `workers` threads (resolved as above).  Tasks must write
// only to their own slots.  If any task throws, the exception from the
// lowest-indexed failing task is rethrown after all tasks finish; callers
// that want per-task failure isolation catch inside fn.
void parallel_for_each(std::size_t n, const std::function<void(std::size_t)>& fn,
                       int workers = 0);

} // namespace gn

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sbl {

/// Number of worker threads: hardware concurrency, capped by the
/// SBL_THREADS environment variable when set.
int worker_count();

/// Runs body(i) for i in [0, count). Work is split into fixed-size chunks
/// handed to workers; every body(i) must write only to slots owned by i,
/// so the result is independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation over a fixed-order sequence. Deterministic:
/// the reduction tree depends only on the length, never on thread count.
double pairwise_sum(std::span<const double> values);

/// Column-wise pairwise reduction of per-point contributions.
///
/// fill(i, out) must write `components` doubles describing point i.
/// Points are processed in fixed chunks; partial sums per chunk are combined
/// pairwise in chunk order, so the result is bit-identical for any number
/// of workers.
std::vector<double> deterministic_accumulate(
    std::size_t count, std::size_t components,
    const std::function<void(std::size_t, double*)>& fill);

} // namespace sbl

#pragma once

#include <cstddef>
#include <functional>

namespace ctxlens {

/// Runs fn over [0, total) split into contiguous chunks, one per worker.
/// Each index is processed by exactly one worker, so any computation whose
/// per-index result does not depend on the partition produces identical
/// output for every thread count.
void parallel_for(std::size_t total, std::size_t threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& fn);

/// Resolves a requested thread count: 0 means hardware concurrency.
/// The CONTEXTLENS_THREADS environment variable, when set, wins.
std::size_t resolve_threads(std::size_t requested);

} // namespace ctxlens

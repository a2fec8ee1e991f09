#pragma once

#include <cstdint>
#include <functional>

namespace halflab {

// Worker count: HALVING_LAB_THREADS when set (>= 1), else the hardware
// concurrency, capped at 16.
std::size_t thread_budget();

// Runs body(i) for i in [0, count). Bodies must touch disjoint state per
// index; results are aggregated by index afterwards, so the outcome is
// independent of scheduling.
void parallel_for(std::uint64_t count, const std::function<void(std::uint64_t)>& body);

}  // namespace halflab

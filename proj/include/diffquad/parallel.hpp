#pragma once

#include <cstddef>
#include <functional>

namespace diffquad {

// Worker cap: DIFFQUAD_THREADS if set (>=1), else hardware concurrency.
std::size_t thread_budget();

// Runs body(i) for i in [0, count). Each index is visited exactly once; the
// caller writes results into index-addressed slots and reduces afterwards in
// index order, which keeps outputs independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace diffquad

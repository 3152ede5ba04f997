#pragma once

#include <cstdint>
#include <functional>

namespace grl {

// Global worker count: --threads flag, GRL_THREADS env, hardware default.
// Results never depend on the count; loops only write disjoint slots.
void set_thread_count(int n);
int thread_count();

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace grl

// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace vlab {

/// Thread count: explicit request if positive, else VLAB_THREADS, else the
/// hardware concurrency.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Evaluate fn(i) for i in [0, n) on at most `threads` workers and return
/// the results in index order. fn must be a pure function of i.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, int threads = 0) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  const int t = resolve_threads(threads);
  if (t == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  tbb::task_arena arena(t);
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) out[i] = fn(i);
    });
  });
  return out;
}

}  // namespace vlab

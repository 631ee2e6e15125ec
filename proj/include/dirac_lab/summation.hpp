#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace dirac_lab {

// Pairwise (cascade) summation with a topology fixed by the input length only.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc{};
    for (const auto& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

/// Evaluates term(i) for i in [0, count) on up to `workers` threads and
/// reduces with pairwise_sum. The partial-sum layout depends only on `count`,
/// so the result is bit-identical for every worker count.
template <typename T, typename Term>
T deterministic_reduce(std::size_t count, Term&& term, unsigned workers = 1) {
  std::vector<T> values(count);
  workers = std::max(1u, workers);
  if (workers == 1 || count < 1024) {
    for (std::size_t i = 0; i < count; ++i) values[i] = term(i);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) values[i] = term(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return pairwise_sum(std::span<const T>(values));
}

}  // namespace dirac_lab

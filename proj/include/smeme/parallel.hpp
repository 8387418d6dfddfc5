#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace smeme {

/// Worker count: SMEME_THREADS if set, otherwise the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("SMEME_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(begin, end) over contiguous index ranges covering [0, n).
/// Items must be independent; results written to disjoint slots stay
/// deterministic regardless of the worker count.
inline void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
  int workers = std::min<Eigen::Index>(thread_count(), n);
  if (workers <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  Eigen::Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    Eigen::Index b = w * chunk;
    Eigen::Index e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

/// Pairwise (cascade) summation; the documented deterministic reduction.
inline double pairwise_sum(const double* x, Eigen::Index n) {
  if (n <= 8) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i];
    return s;
  }
  Eigen::Index half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const Eigen::VectorXd& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace smeme

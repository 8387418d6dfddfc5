#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace smeme {

/// Deterministic, splittable random stream. Child streams are derived by
/// mixing a tag into the parent seed, so trajectory i always sees the same
/// noise regardless of batching or thread count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_base_(mix(seed)), gen_(seed_base_) {}

  /// Derive an independent stream for sub-task `tag`.
  RngStream child(std::uint64_t tag) const {
    RngStream s(0);
    s.seed_base_ = mix(seed_base_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    s.gen_.seed(s.seed_base_);
    return s;
  }

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    return d(gen_);
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) { return normal_matrix(n, 1); }

  std::mt19937_64& engine() { return gen_; }

  /// splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_base_;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace smeme

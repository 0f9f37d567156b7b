#pragma once

// Seeded instance generators shared by the property tests.

#include <cstdint>
#include <random>
#include <vector>

namespace mdk::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }

  // Random point of the simplex; each entry is zeroed with probability
  // `sparsity` (at least one entry stays positive).
  std::vector<double> simplex(std::size_t n, double sparsity = 0.0) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& x : p) {
      x = uniform() < sparsity ? 0.0 : std::exponential_distribution<double>(1.0)(rng_);
      total += x;
    }
    if (total == 0.0) {
      p[below(n)] = 1.0;
      return p;
    }
    for (auto& x : p) x /= total;
    return p;
  }

  std::vector<double> stochastic(std::size_t rows, std::size_t cols, double sparsity = 0.0) {
    std::vector<double> w;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = simplex(cols, sparsity);
      w.insert(w.end(), row.begin(), row.end());
    }
    return w;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mdk::test

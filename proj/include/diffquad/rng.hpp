#pragma once

#include <cstdint>
#include <random>

namespace diffquad {

// Counter-based seeding: every (seed, stream) pair maps to an independent
// engine, so parallel trials indexed by `stream` are reproducible regardless
// of scheduling.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  std::uint64_t below(std::uint64_t n);  // [0, n)

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace diffquad

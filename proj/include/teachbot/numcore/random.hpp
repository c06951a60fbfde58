#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "teachbot/numcore/tensor.hpp"

namespace teachbot::num {

// Deterministic across platforms: mt19937_64 is fully specified by the
// standard, and the conversions below avoid the implementation-defined
// std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // Independent child stream, used to give subsystems their own sequence.
  Rng split() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Matrix of shape fan_out x fan_in, entries uniform in [-b, b] with
/// b = sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

void fill_uniform(Tensor& t, double lo, double hi, Rng& rng);

}  // namespace teachbot::num

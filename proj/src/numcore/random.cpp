#include "teachbot/numcore/random.hpp"

#include <cmath>
#include <limits>

#include "teachbot/error.hpp"

namespace teachbot::num {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) {
    throw ArgumentError("xavier_uniform: fans must be >= 1 (got " + std::to_string(fan_in) +
                        ", " + std::to_string(fan_out) + ")");
  }
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double b = xavier_bound(fan_in, fan_out);
  Tensor w(Shape{fan_out, fan_in});
  fill_uniform(w, -b, b, rng);
  return w;
}

void fill_uniform(Tensor& t, double lo, double hi, Rng& rng) {
  for (double& v : t.values()) v = rng.uniform(lo, hi);
}

}  // namespace teachbot::num

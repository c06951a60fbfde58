#pragma once

#include <cstdint>
#include <vector>

#include "teachbot/numcore/parameter.hpp"

namespace teachbot::num {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are allocated lazily to match the
/// parameter set the first time step() sees it.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Throws NumericError (and leaves every parameter untouched) if any
  // gradient is non-finite.
  void step(ParameterSet& params);

  std::uint64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace teachbot::num

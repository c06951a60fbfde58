#include "teachbot/numcore/adam.hpp"

#include <cmath>

#include "teachbot/error.hpp"

namespace teachbot::num {

void Adam::step(ParameterSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].grad.all_finite()) {
      throw NumericError("adam: non-finite gradient in " + params[i].name + ", step aborted");
    }
  }
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.emplace_back(params[i].value.shape());
      v_.emplace_back(params[i].value.shape());
    }
  }

  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(options_.beta1, t);
  const double c2 = 1.0 - std::pow(options_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    if (m_[i].shape() != p.value.shape()) throw ArgumentError("adam: moment shape mismatch for " + p.name);
    auto m = m_[i].values();
    auto v = v_[i].values();
    auto g = p.grad.values();
    auto x = p.value.values();
    for (std::size_t k = 0; k < x.size(); ++k) {
      m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g[k];
      v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      x[k] -= options_.learning_rate * mhat / (std::sqrt(vhat) + options_.epsilon);
    }
  }
}

}  // namespace teachbot::num

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "teachbot/numcore/functions.hpp"
#include "teachbot/numcore/graph.hpp"
#include "teachbot/numcore/parameter.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::testing {

using LossBuilder = std::function<num::Var(num::Graph&)>;

struct GradCheckResult {
  std::map<std::string, double> error;  // per parameter, norm-wise relative
  double worst = 0.0;
  std::string worst_name;
};

/// Compares backprop gradients of `loss` against central differences for
/// every parameter in `params`. Large tensors are probed at `max_coords`
/// random coordinates (always including the largest analytic entries).
inline GradCheckResult check_gradients(num::ParameterSet& params, const LossBuilder& loss, num::Rng& rng,
                                       std::size_t max_coords = 24, double h = 1e-5) {
  params.zero_grad();
  {
    num::Graph g;
    g.backward(loss(g));
  }
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    num::Parameter& param = params[p];
    std::vector<std::size_t> coords;
    if (param.value.size() <= max_coords) {
      for (std::size_t i = 0; i < param.value.size(); ++i) coords.push_back(i);
    } else {
      std::vector<std::size_t> order(param.value.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::partial_sort(order.begin(), order.begin() + max_coords / 2, order.end(), [&](auto a, auto b) {
        return std::abs(param.grad[a]) > std::abs(param.grad[b]);
      });
      coords.assign(order.begin(), order.begin() + max_coords / 2);
      while (coords.size() < max_coords) coords.push_back(rng.below(param.value.size()));
    }
    const num::Tensor saved = param.value;
    auto f = [&](const num::Tensor& x) {
      param.value = x;
      num::Graph g;
      return loss(g).scalar();
    };
    const num::Tensor numeric = num::finite_diff_grad(f, saved, coords, h);
    param.value = saved;
    std::vector<double> a, n;
    for (auto i : coords) {
      a.push_back(param.grad[i]);
      n.push_back(numeric[i]);
    }
    const double err = num::relative_error(a, n);
    result.error[param.name] = err;
    if (err >= result.worst) {
      result.worst = err;
      result.worst_name = param.name;
    }
  }
  return result;
}

}  // namespace teachbot::testing

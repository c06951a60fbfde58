#include "teachbot/numcore/parameter.hpp"

#include "teachbot/error.hpp"

namespace teachbot::num {

Parameter& ParameterSet::add(std::string name, Tensor value) {
  if (find(name) != nullptr) throw ArgumentError("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(std::move(name), std::move(value)));
  return *params_.back();
}

Parameter* ParameterSet::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

const Parameter* ParameterSet::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

Parameter& ParameterSet::get(const std::string& name) {
  if (auto* p = find(name)) return *p;
  throw ArgumentError("no parameter named " + name);
}

const Parameter& ParameterSet::get(const std::string& name) const {
  if (const auto* p = find(name)) return *p;
  throw ArgumentError("no parameter named " + name);
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::vector<Tensor> ParameterSet::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterSet::restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) throw ArgumentError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != params_[i]->value.shape())
      throw ArgumentError("restore: shape mismatch for " + params_[i]->name);
    params_[i]->value = values[i];
  }
}

}  // namespace teachbot::num

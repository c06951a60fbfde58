#pragma once

#include <memory>
#include <string>
#include <vector>

#include "teachbot/model/model.hpp"

namespace teachbot::testing {

inline const std::vector<std::string>& tiny_templates() {
  static const std::vector<std::string> t{
      "hello , how can i help ?",
      "what city are you in ?",
      "it will be sunny in <city> on <day>",
      "which day ?",
      "you're welcome !",
  };
  return t;
}

inline model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.dims = {4, 3};
  c.context_hidden = 5;
  return c;
}

/// A small, fully parameterized model over a weather-like toy domain.
inline std::unique_ptr<model::Model> make_tiny_model(std::uint64_t seed, model::ModelConfig config = tiny_config()) {
  enc::Vocabulary vocab;
  for (const auto& t : tiny_templates()) vocab.add_text(t);
  for (const char* t : {"what's the weather in <city>", "on <day> please", "thanks", "hi"}) vocab.add_text(t);
  num::Rng rng(seed);
  return std::make_unique<model::Model>(config, std::move(vocab), std::vector<std::string>{"city", "day"},
                                        model::ActionCatalog(tiny_templates()), rng);
}

inline std::vector<model::TurnInput> tiny_dialog() {
  return {
      {"hi", {}, {0, 1, 2, 3, 4}, 0},
      {"what's the weather in <city>", {{"city", "Seattle", 22, 29}}, {1, 3, 2}, 3},
      {"on <day> please", {{"day", "Monday", 3, 9}}, {2, 0, 4, 3}, 2},
      {"thanks", {}, {4, 1, 0}, 4},
  };
}

inline nlr::RuleBook tiny_rules() {
  nlr::RuleBook b;
  b.u_rules.kind = nlr::RuleKind::User;
  b.s_rules.kind = nlr::RuleKind::System;
  b.u_rules.rules = {{"thanks", "you're welcome!"}, {"what's the weather in <city>", "which day?"}};
  b.s_rules.rules = {{"which day?", "it will be sunny in <city> on <day>"}};
  return b;
}

}  // namespace teachbot::testing

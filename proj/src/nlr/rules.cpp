#include "teachbot/nlr/rules.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"

namespace teachbot::nlr {

using nlohmann::json;

std::string_view kind_name(RuleKind kind) { return kind == RuleKind::System ? "s" : "u"; }

namespace {

// Every '<' must open a well-formed placeholder.
std::string placeholder_problem(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '<') continue;
    std::size_t j = i + 1;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
    if (j == i + 1 || j >= text.size() || text[j] != '>') {
      const std::size_t end = std::min(text.size(), i + 16);
      return "malformed placeholder near '" + std::string(text.substr(i, end - i)) + "'";
    }
    i = j;
  }
  return {};
}

}  // namespace

std::vector<std::string> validate_rule(const Rule& rule) {
  std::vector<std::string> problems;
  for (auto [name, text] : {std::pair<const char*, const std::string*>{"pre", &rule.pre}, {"post", &rule.post}}) {
    if (enc::trim(*text).empty()) {
      problems.push_back(std::string("empty ") + name + "-condition");
      continue;
    }
    if (auto p = placeholder_problem(*text); !p.empty()) problems.push_back(std::string(name) + "-condition: " + p);
  }
  return problems;
}

RuleBook parse_rules(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("rule file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("rule file must be a JSON object");

  RuleBook book;
  std::vector<std::string> errors;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    RuleSet* target = nullptr;
    if (it.key() == "s_rules") {
      target = &book.s_rules;
    } else if (it.key() == "u_rules") {
      target = &book.u_rules;
    } else {
      errors.push_back("unknown rule kind '" + it.key() + "' (expected s_rules or u_rules)");
      continue;
    }
    if (!it.value().is_array()) {
      errors.push_back(it.key() + ": expected a list of rules");
      continue;
    }
    std::size_t index = 0;
    for (const auto& item : it.value()) {
      const std::string where = it.key() + "[" + std::to_string(index++) + "]";
      if (!item.is_object()) {
        errors.push_back(where + ": expected an object with \"pre\" and \"post\"");
        continue;
      }
      Rule rule;
      bool ok = true;
      for (auto [field, dst] : {std::pair<const char*, std::string*>{"pre", &rule.pre}, {"post", &rule.post}}) {
        auto f = item.find(field);
        if (f == item.end() || !f->is_string()) {
          errors.push_back(where + ": missing string field \"" + field + "\"");
          ok = false;
        } else {
          *dst = f->get<std::string>();
        }
      }
      if (!ok) continue;
      for (const auto& p : validate_rule(rule)) errors.push_back(where + ": " + p);
      target->rules.push_back(std::move(rule));
    }
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ValidationError(msg);
  }
  return book;
}

RuleBook load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open rule file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

std::string rules_to_json(const RuleBook& book) {
  json doc;
  for (const RuleSet* set : {&book.s_rules, &book.u_rules}) {
    json arr = json::array();
    for (const auto& r : set->rules) arr.push_back({{"pre", r.pre}, {"post", r.post}});
    doc[set->kind == RuleKind::System ? "s_rules" : "u_rules"] = std::move(arr);
  }
  return doc.dump(2) + "\n";
}

}  // namespace teachbot::nlr

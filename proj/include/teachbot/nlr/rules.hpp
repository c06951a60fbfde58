#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace teachbot::nlr {

enum class RuleKind { System, User };

std::string_view kind_name(RuleKind kind);  // "s" / "u"

/// (pre-condition, post-condition) in natural language. For s-rules the
/// pre-condition describes the previous system action, for u-rules the
/// user input; the post-condition is always a system action.
struct Rule {
  std::string pre;
  std::string post;
};

struct RuleSet {
  RuleKind kind = RuleKind::User;
  std::vector<Rule> rules;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

struct RuleBook {
  RuleSet s_rules{RuleKind::System, {}};
  RuleSet u_rules{RuleKind::User, {}};
};

/// Parses {"s_rules": [{"pre": ..., "post": ...}, ...], "u_rules": [...]}.
/// Either list may be absent. Throws ValidationError naming the offending
/// rule (e.g. "u_rules[2]: empty post-condition") for missing fields, empty
/// conditions, malformed `<slot>` placeholders or unknown rule kinds.
RuleBook parse_rules(std::string_view json_text);
RuleBook load_rules(const std::filesystem::path& path);

std::string rules_to_json(const RuleBook& book);

/// Every problem found, one message per line item; empty when valid.
std::vector<std::string> validate_rule(const Rule& rule);

}  // namespace teachbot::nlr

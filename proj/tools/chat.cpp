#include "chat.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"
#include "teachbot/nlr/rules.hpp"

namespace teachbot::cli {

namespace {

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// Positions of the `k` largest entries, largest first, ties by position.
std::vector<std::size_t> top_k(std::span<const double> v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return v[a] > v[b] || (v[a] == v[b] && a < b); });
  idx.resize(k);
  return idx;
}

}  // namespace

ChatSession::ChatSession(model::Model& model, std::string rules_path, model::Lexicon lexicon, bool debug,
                         std::ostream& out)
    : model_(model),
      rules_path_(std::move(rules_path)),
      lexicon_(std::move(lexicon)),
      debug_(debug),
      out_(out),
      state_(model.initial_state()),
      all_ids_(model.catalog().all_ids()) {}

bool ChatSession::handle(const std::string& raw) {
  const std::string line = enc::trim(raw);
  if (line.empty()) return true;
  if (line == "/quit") return false;
  if (line == "/reset") {
    state_ = model_.initial_state();
    transcript_.push_back("[reset]");
    out_ << "[state reset]\n";
  } else if (line == "/rules") {
    reload_rules();
  } else if (line.front() == '/') {
    out_ << "unknown command " << line << " (commands: /reset, /rules, /quit)\n";
  } else {
    respond(line);
  }
  return true;
}

void ChatSession::respond(const std::string& line) {
  transcript_.push_back("user: " + line);
  const auto mentions = model::extract_entities(line, lexicon_);
  model::TurnInput input;
  input.user = enc::normalize(model::delexicalize(line, mentions));
  input.mentions = mentions;
  input.candidates = all_ids_;
  num::Graph g;
  model::DialogPass pass(model_, g, state_);
  const auto r = pass.turn(input);
  const std::string reply = model::entity_output(model_.catalog()[r.selected].text, state_.entities);
  transcript_.push_back("bot: " + reply);
  out_ << "bot: " << reply << "\n";
  if (debug_) debug_pane(r);
}

void ChatSession::debug_pane(const model::TurnResult& r) {
  const auto& catalog = model_.catalog();
  const auto probs = r.probs.value().values();
  out_ << "  top-5:\n";
  for (std::size_t i : top_k(probs, 5))
    out_ << "    " << fixed(probs[i]) << "  [" << r.candidates[i] << "] " << catalog[r.candidates[i]].text << "\n";
  const auto& rules = model_.rules();
  const std::pair<const char*, const std::optional<nlr::RuleSetInference>*> sets[] = {{"s", &r.nlr.s},
                                                                                      {"u", &r.nlr.u}};
  for (const auto& [kind, inference] : sets) {
    const auto& set = kind[0] == 's' ? rules.s_rules : rules.u_rules;
    if (!*inference) {
      out_ << "  " << kind << "-rules: off\n";
      continue;
    }
    const auto& inf = **inference;
    const auto mu = inf.mu.value().values();
    out_ << "  " << kind << "-rules (top mu):\n";
    for (std::size_t i : top_k(mu, 3)) {
      out_ << "    " << fixed(mu[i]) << "  ";
      if (i < set.size())
        out_ << kind << "_rules[" << i << "] \"" << set.rules[i].pre << "\" -> \"" << set.rules[i].post << "\"\n";
      else
        out_ << "(no match)\n";
    }
    const auto alpha = inf.combined.alpha.value().values();
    const double mass = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    out_ << "    alpha mass " << fixed(mass) << ", zero mass " << fixed(inf.combined.zero_mass.scalar()) << "\n";
  }
}

void ChatSession::reload_rules() {
  if (rules_path_.empty()) {
    out_ << "no rule file to reload\n";
    return;
  }
  try {
    model_.set_rules(nlr::load_rules(rules_path_));
    transcript_.push_back("[rules reloaded]");
    out_ << "[rules reloaded: " << model_.rules().s_rules.size() << " s-rules, " << model_.rules().u_rules.size()
         << " u-rules]\n";
  } catch (const ValidationError& e) {
    out_ << "rule file rejected, keeping the previous rules:\n" << e.what() << "\n";
  }
}

}  // namespace teachbot::cli

#include "teachbot/train/evaluate.hpp"

#include <json.hpp>
#include <limits>
#include <numeric>

#include "teachbot/error.hpp"

namespace teachbot::train {

using json = nlohmann::ordered_json;

model::TurnInput turn_input(const data::ProcessedTurn& turn, std::vector<std::size_t> candidates) {
  model::TurnInput in;
  in.user = turn.user;
  in.mentions = turn.mentions;
  in.candidates = std::move(candidates);
  in.taken = turn.gold;
  return in;
}

void ModelScorer::begin_dialog() {
  pass_.reset();
  graph_ = std::make_unique<num::Graph>();
  state_ = model_.initial_state();
  pass_ = std::make_unique<model::DialogPass>(model_, *graph_, state_);
}

std::vector<double> ModelScorer::score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) {
  if (!pass_) begin_dialog();
  const auto& p = pass_->turn(turn_input(turn, candidates)).probs.value().values();
  return {p.begin(), p.end()};
}

std::vector<double> OracleScorer::score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) {
  std::vector<double> s(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i] == turn.gold) s[i] = std::numeric_limits<double>::infinity();
  return s;
}

std::vector<double> RandomScorer::score(const data::ProcessedTurn&, const std::vector<std::size_t>& candidates) {
  std::vector<double> s(candidates.size());
  for (double& v : s) v = rng_.uniform01();
  return s;
}

std::size_t gold_rank(const std::vector<double>& scores, const std::vector<std::size_t>& ids, std::size_t gold) {
  if (scores.size() != ids.size()) throw ArgumentError("gold_rank: scores/ids size mismatch");
  std::size_t at = ids.size();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == gold) at = i;
  if (at == ids.size()) throw ArgumentError("gold_rank: gold template " + std::to_string(gold) + " not among candidates");
  const double g = scores[at];
  std::size_t rank = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i == at) continue;
    if (scores[i] > g || (scores[i] == g && ids[i] < gold)) ++rank;
  }
  return rank;
}

namespace {

struct Tally {
  std::size_t hit1 = 0, hit2 = 0, hit5 = 0, turns = 0;

  void add(std::size_t rank) {
    hit1 += rank < 1;
    hit2 += rank < 2;
    hit5 += rank < 5;
    ++turns;
  }
  Recall recall() const {
    Recall r;
    r.turns = turns;
    if (turns == 0) return r;
    const double n = static_cast<double>(turns);
    r.r1 = hit1 / n;
    r.r2 = hit2 / n;
    r.r5 = hit5 / n;
    return r;
  }
};

json recall_json(const Recall& r) {
  return json{{"recall@1", r.r1}, {"recall@2", r.r2}, {"recall@5", r.r5}, {"turns", r.turns}};
}

}  // namespace

EvalReport evaluate(Scorer& scorer, const std::vector<data::ProcessedDialog>& dialogs, std::size_t catalog_size,
                    const EvalOptions& options) {
  std::vector<std::size_t> everything(catalog_size);
  std::iota(everything.begin(), everything.end(), std::size_t{0});
  Tally all;
  std::map<std::string, Tally> by_domain;
  for (const auto& dialog : dialogs) {
    scorer.begin_dialog();
    for (const auto& turn : dialog.turns) {
      const auto& ids = options.full_catalog ? everything : turn.candidates;
      const std::size_t rank = gold_rank(scorer.score(turn, ids), ids, turn.gold);
      all.add(rank);
      by_domain[dialog.domain].add(rank);
    }
  }
  EvalReport report;
  report.overall = all.recall();
  for (const auto& [domain, t] : by_domain) report.per_domain[domain] = t.recall();
  return report;
}

EvalReport evaluate(const model::Model& model, const std::vector<data::ProcessedDialog>& dialogs,
                    const EvalOptions& options) {
  ModelScorer scorer(model);
  return evaluate(scorer, dialogs, model.catalog().size(), options);
}

std::string report_to_json(const EvalReport& report) {
  json j = recall_json(report.overall);
  json domains = json::object();
  for (const auto& [domain, r] : report.per_domain) domains[domain] = recall_json(r);
  j["per_domain"] = domains;
  return j.dump(2) + "\n";
}

}  // namespace teachbot::train

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "teachbot/data/dataset.hpp"
#include "teachbot/model/model.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::train {

/// Scores the candidates of each turn of a dialog, in order.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void begin_dialog() {}
  virtual std::vector<double> score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) = 0;
};

/// Teacher-forced model scores: the recorded gold action becomes the next
/// turn's previous action.
class ModelScorer : public Scorer {
 public:
  explicit ModelScorer(const model::Model& model) : model_(model) {}
  void begin_dialog() override;
  std::vector<double> score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) override;

 private:
  const model::Model& model_;
  model::DialogState state_;
  std::unique_ptr<num::Graph> graph_;
  std::unique_ptr<model::DialogPass> pass_;
};

/// Gives the gold template +infinity and everything else 0.
class OracleScorer : public Scorer {
 public:
  std::vector<double> score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) override;
};

/// Independent uniform scores.
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : rng_(seed) {}
  std::vector<double> score(const data::ProcessedTurn& turn, const std::vector<std::size_t>& candidates) override;

 private:
  num::Rng rng_;
};

/// 0-based rank of the gold candidate. Equal scores are ordered by template
/// id, so a tie only favours gold when it has the lowest id.
std::size_t gold_rank(const std::vector<double>& scores, const std::vector<std::size_t>& ids, std::size_t gold);

struct Recall {
  double r1 = 0, r2 = 0, r5 = 0;
  std::size_t turns = 0;
};

struct EvalReport {
  Recall overall;
  std::map<std::string, Recall> per_domain;
};

struct EvalOptions {
  bool full_catalog = false;  // rank every template instead of the sampled ten
};

EvalReport evaluate(Scorer& scorer, const std::vector<data::ProcessedDialog>& dialogs, std::size_t catalog_size,
                    const EvalOptions& options = {});
EvalReport evaluate(const model::Model& model, const std::vector<data::ProcessedDialog>& dialogs,
                    const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);

/// Turn inputs for a recorded dialog, with the gold action as the taken one.
model::TurnInput turn_input(const data::ProcessedTurn& turn, std::vector<std::size_t> candidates);

}  // namespace teachbot::train

#pragma once

#include <string>
#include <vector>

#include "teachbot/data/dataset.hpp"
#include "teachbot/nlr/rules.hpp"
#include "teachbot/train/trainer.hpp"

namespace teachbot::train {

struct AblationRow {
  model::Variant variant;
  std::vector<double> recall1;  // test recall@1, one per seed
  double mean = 0;
};

/// Trains NLR, NLR-S, NLR-U and NLR-SU (in that order) with seeds
/// base.seed, base.seed+1, ... and reports test recall@1.
std::vector<AblationRow> ablate(const TrainConfig& base, const data::DomainDataset& ds, const nlr::RuleBook& rules,
                                std::size_t seeds);
std::string ablation_table(const std::vector<AblationRow>& rows);
std::string ablation_json(const std::vector<AblationRow>& rows);

struct CurvePoint {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  model::Variant variant = model::Variant::Nlr;
  double recall1 = 0;
};

/// For every size, seed and variant: train on the first `size` dialogs of a
/// seeded shuffle of the training split and record test recall@1.
std::vector<CurvePoint> learning_curve(const TrainConfig& base, const data::DomainDataset& ds,
                                       const nlr::RuleBook& rules, const std::vector<std::size_t>& sizes,
                                       std::size_t seeds, const std::vector<model::Variant>& variants);
std::string curve_csv(const std::vector<CurvePoint>& points);  // size,seed,variant,recall1

struct CurveSummary {
  std::size_t size = 0;
  model::Variant variant = model::Variant::Nlr;
  double mean = 0;
  double std = 0;  // population standard deviation over seeds
};
std::vector<CurveSummary> summarize(const std::vector<CurvePoint>& points);

/// The training split restricted to its first `size` dialogs after a
/// shuffle seeded with `seed`.
data::DomainDataset subsample_train(const data::DomainDataset& ds, std::size_t size, std::uint64_t seed);

}  // namespace teachbot::train

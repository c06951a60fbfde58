#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teachbot/data/dataset.hpp"
#include "teachbot/model/model.hpp"
#include "teachbot/nlr/rules.hpp"
#include "teachbot/numcore/graph.hpp"

namespace teachbot::train {

enum class EncoderVariant { SC, WE };  // from scratch / pretrained word vectors
enum class UpdateMode { Dialog, Turn };

struct TrainConfig {
  std::string domain = "all";  // restricts the dataset's dialogs by domain
  model::ModelConfig model;  // includes the NLR variant
  EncoderVariant encoder = EncoderVariant::SC;
  double lr = 1e-3;
  double clip_norm = 5.0;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::string rules_path;
  std::string word_vectors_path;  // WE only
  std::optional<std::size_t> train_size;
  UpdateMode update = UpdateMode::Dialog;
  bool resample_per_epoch = false;
};

std::string config_to_json(const TrainConfig& c);
TrainConfig config_from_json(const std::string& json);  // unknown keys are errors
/// Throws ConfigError when the config cannot run, e.g. a rule-using
/// variant without a rule file or WE without word vectors.
void validate(const TrainConfig& c, bool rules_given);

/// -log p(gold), p floored at 1e-12.
num::Var turn_loss(num::Var distribution, std::size_t gold_index);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;  // mean per turn
  double dev_recall1 = 0;
  double seconds = 0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based, argmax of dev recall@1
};

/// One JSON line per epoch, without timing, so runs can be compared byte
/// for byte. Timing goes to timing_jsonl().
std::string metrics_jsonl(const TrainHistory& h);
std::string timing_jsonl(const TrainHistory& h);

/// Token inventory of every split, the catalog and the rules.
enc::Vocabulary build_vocabulary(const data::DomainDataset& ds, const nlr::RuleBook& rules);

struct FitResult {
  std::unique_ptr<model::Model> model;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Adam on one dialog per update (or one turn with UpdateMode::Turn),
/// gradients clipped to the configured global norm, dev recall@1 after each
/// epoch and early stopping with `patience`. Returns the parameters of the
/// best epoch. A non-finite loss aborts with NumericError naming the epoch,
/// dialog and turn.
FitResult fit(const TrainConfig& config, const data::DomainDataset& ds, const nlr::RuleBook& rules,
              const EpochCallback& on_epoch = {});

/// Builds an untrained model for `ds` exactly as fit() would.
std::unique_ptr<model::Model> make_model(const TrainConfig& config, const data::DomainDataset& ds,
                                         const nlr::RuleBook& rules, num::Rng& rng);

}  // namespace teachbot::train

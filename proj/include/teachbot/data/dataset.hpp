#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "teachbot/data/kvret.hpp"
#include "teachbot/model/catalog.hpp"
#include "teachbot/model/entities.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::data {

inline constexpr std::size_t kCandidates = 10;

/// Slot values of one dialog: KB cells (column name as slot type), then
/// turn annotations, which win on conflicts.
model::Lexicon dialog_lexicon(const RawDialog& dialog);

struct DelexTurn {
  Speaker speaker = Speaker::Driver;
  std::string original;
  std::string delex;  // original with every mention replaced by <slot>
  std::vector<model::Mention> mentions;
};

/// Merges same-speaker runs and delexicalizes every utterance against the
/// dialog lexicon.
std::vector<DelexTurn> delexicalize_dialog(const RawDialog& dialog);

/// Inverse of delexicalize: fills placeholders left to right with the
/// recorded mention surfaces.
std::string relexicalize(const std::string& delex, const std::vector<model::Mention>& mentions);

struct TemplateCatalog {
  model::ActionCatalog actions;
  std::vector<std::size_t> counts;

  std::size_t add(const std::string& text);
};

struct CandidateSet {
  std::vector<std::size_t> ids;
  std::size_t gold_index = 0;
};

/// Gold plus nine distinct distractors drawn uniformly without replacement,
/// gold at a uniformly random position. Catalogs under ten templates throw
/// ConfigError unless `small_catalog_fallback`, in which case the whole
/// catalog is returned in id order.
CandidateSet make_candidates(std::size_t gold, std::size_t catalog_size, num::Rng& rng,
                             bool small_catalog_fallback = false);

struct ProcessedTurn {
  std::string dialog_id;
  std::size_t turn_index = 0;
  std::string user;         // delexicalized, normalized
  std::string system;       // gold template text
  std::string prev_system;  // previous gold template, empty on the first turn
  std::size_t gold = 0;
  std::vector<std::size_t> candidates;
  std::size_t gold_index = 0;
  std::vector<model::Mention> mentions;  // in the original user text
  std::size_t user_tokens = 0;           // of the original utterances
  std::size_t system_tokens = 0;
};

struct ProcessedDialog {
  std::string id;
  std::string domain;
  std::size_t utterances = 0;  // after merging
  std::vector<ProcessedTurn> turns;
};

struct DomainDataset {
  std::string domain;
  std::vector<ProcessedDialog> train;
  std::vector<ProcessedDialog> dev;
  std::vector<ProcessedDialog> test;
  TemplateCatalog catalog;
  std::vector<std::string> slot_types;
  model::Lexicon lexicon;
  std::uint64_t seed = 0;

  const std::vector<ProcessedDialog>& split(std::string_view name) const;
};

struct BuildOptions {
  std::string domain = "all";
  bool small_catalog_fallback = false;
};

/// Delexicalizes, builds the corpus-wide catalog (train, dev, test order of
/// first occurrence) and samples candidate sets with `seed`. A trailing
/// driver utterance without a reply produces no turn; a leading assistant
/// utterance is paired with an empty user turn.
DomainDataset build_dataset(const RawCorpus& raw, std::uint64_t seed, const BuildOptions& options = {});

struct DatasetStats {
  std::size_t dialogs = 0;
  std::size_t turns = 0;
  double avg_turns_per_dialog = 0;  // merged utterances, both speakers
  double avg_user_tokens = 0;
  double avg_system_tokens = 0;
  std::size_t templates = 0;
};

DatasetStats dataset_stats(const std::vector<ProcessedDialog>& dialogs, std::size_t templates);
DatasetStats dataset_stats(const DomainDataset& ds);  // all splits

/// Writes train/dev/test.jsonl, catalog.json and schema.json. Every file is
/// written to a temporary name first and renamed once all are complete.
void write_dataset(const std::filesystem::path& dir, const DomainDataset& ds);
DomainDataset read_dataset(const std::filesystem::path& dir);

std::string catalog_to_json(const TemplateCatalog& catalog);
TemplateCatalog read_catalog(const std::filesystem::path& path);

}  // namespace teachbot::data

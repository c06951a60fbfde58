#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace teachbot::data {

enum class Speaker { Driver, Assistant };

struct RawTurn {
  Speaker speaker = Speaker::Driver;
  std::string utterance;
  std::map<std::string, std::string> slots;
};

using KbRow = std::map<std::string, std::string>;

struct RawDialog {
  std::string id;
  std::string domain;  // task intent: weather, navigate, schedule
  std::vector<RawTurn> turns;
  std::vector<std::string> kb_columns;
  std::vector<KbRow> kb;
};

struct RawCorpus {
  std::vector<RawDialog> train;
  std::vector<RawDialog> dev;
  std::vector<RawDialog> test;
};

inline constexpr std::string_view kTrainFile = "kvret_train_public.json";
inline constexpr std::string_view kDevFile = "kvret_dev_public.json";
inline constexpr std::string_view kTestFile = "kvret_test_public.json";

/// Parses the in-car assistant JSON format. `source` prefixes messages.
/// Syntax errors throw ParseError; structural problems (including an empty
/// file or an empty list) throw SchemaError naming the dialog index.
std::vector<RawDialog> parse_kvret(std::string_view text, std::string_view source = "<input>");
std::vector<RawDialog> load_kvret(const std::filesystem::path& path);
/// Loads the three split files from `dir`; a missing file throws ConfigError
/// before anything is read.
RawCorpus load_kvret_dir(const std::filesystem::path& dir);

std::string kvret_to_json(const std::vector<RawDialog>& dialogs);

/// Keeps dialogs of one domain; "all" keeps everything.
std::vector<RawDialog> filter_domain(const std::vector<RawDialog>& dialogs, std::string_view domain);

/// Joins consecutive turns of the same speaker with a space; slot
/// annotations of later turns win.
std::vector<RawTurn> merge_turns(const std::vector<RawTurn>& turns);

}  // namespace teachbot::data

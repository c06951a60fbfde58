#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "teachbot/model/entities.hpp"
#include "teachbot/model/model.hpp"

namespace teachbot::cli {

/// Interactive loop over a loaded model. Every turn ranks the full catalog
/// and the model's own choice becomes the next previous action.
class ChatSession {
 public:
  ChatSession(model::Model& model, std::string rules_path, model::Lexicon lexicon, bool debug, std::ostream& out);

  /// Handles one input line; returns false on /quit.
  bool handle(const std::string& line);

  const std::vector<std::string>& transcript() const { return transcript_; }
  const model::DialogState& state() const { return state_; }

 private:
  void respond(const std::string& line);
  void reload_rules();
  void debug_pane(const model::TurnResult& r);

  model::Model& model_;
  std::string rules_path_;
  model::Lexicon lexicon_;
  bool debug_;
  std::ostream& out_;
  model::DialogState state_;
  std::vector<std::size_t> all_ids_;
  std::vector<std::string> transcript_;
};

}  // namespace teachbot::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace teachbot::model {

struct ActionTemplate {
  std::size_t id = 0;
  std::string text;  // delexicalized, normalized
  bool is_api = false;
};

/// Templates whose first token is "api_call" are API actions.
bool is_api_text(std::string_view text);

/// Dense id -> template map with unique texts.
class ActionCatalog {
 public:
  ActionCatalog() = default;
  explicit ActionCatalog(const std::vector<std::string>& texts);  // throws on duplicates

  // Returns the id of `text`, adding it if new.
  std::size_t add(std::string_view text);
  std::optional<std::size_t> find(std::string_view text) const;

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const ActionTemplate& operator[](std::size_t id) const { return items_.at(id); }
  const std::vector<ActionTemplate>& items() const { return items_; }
  std::vector<std::string> texts() const;
  std::vector<std::size_t> all_ids() const;
  // Order-sensitive hash of the texts, used to pair checkpoints with catalogs.
  std::uint64_t fingerprint() const;

 private:
  std::vector<ActionTemplate> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace teachbot::model

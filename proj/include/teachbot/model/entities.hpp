#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "teachbot/numcore/tensor.hpp"

namespace teachbot::model {

struct Mention {
  std::string slot;
  std::string surface;  // exact substring of the input
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte

  bool operator==(const Mention&) const = default;
};

/// Dictionary of known slot values. Lookups are case-insensitive; adding a
/// value twice keeps the latest slot type.
class Lexicon {
 public:
  void add(std::string_view slot, std::string_view value);
  void merge(const Lexicon& other);
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  // lowercased value -> slot type, in value order
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::size_t longest_ = 0;

  friend std::vector<Mention> extract_entities(std::string_view, const Lexicon&);
};

/// Case-insensitive dictionary matching at word boundaries. Spans never
/// overlap: scanning left to right, the longest value starting at the
/// earliest position wins.
std::vector<Mention> extract_entities(std::string_view text, const Lexicon& lexicon);

/// Replaces every mention with "<slot>".
std::string delexicalize(std::string_view text, const std::vector<Mention>& mentions);

/// Current grounded value per slot type, in a fixed slot order.
class EntityStore {
 public:
  EntityStore() = default;
  explicit EntityStore(std::vector<std::string> slot_types);

  const std::vector<std::string>& slot_types() const { return slots_; }
  bool has_slot(std::string_view slot) const;
  bool present(std::string_view slot) const;
  const std::string* value(std::string_view slot) const;
  // Mentions of unknown slot types are ignored.
  void set(std::string_view slot, std::string value);
  void clear();
  num::Tensor flags() const;

 private:
  std::vector<std::string> slots_;
  std::map<std::string, std::string, std::less<>> values_;
};

/// Writes the mentions into the store (later mentions overwrite) and
/// returns the presence flags.
num::Tensor entity_track(EntityStore& store, const std::vector<Mention>& mentions);

/// Substitutes "<slot>" placeholders with stored values; unknown or empty
/// slots are left as they are.
std::string entity_output(std::string_view templ, const EntityStore& store);

}  // namespace teachbot::model

#include "teachbot/model/entities.hpp"

#include <algorithm>
#include <cctype>

#include "teachbot/encoder/tokenize.hpp"

namespace teachbot::model {

namespace {

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80; }

}  // namespace

void Lexicon::add(std::string_view slot, std::string_view value) {
  std::string key = enc::to_lower(enc::trim(value));
  if (key.empty() || slot.empty()) return;
  longest_ = std::max(longest_, key.size());
  values_.insert_or_assign(std::move(key), std::string(slot));
}

void Lexicon::merge(const Lexicon& other) {
  for (const auto& [value, slot] : other.values_) add(slot, value);
}

std::vector<Mention> extract_entities(std::string_view text, const Lexicon& lexicon) {
  std::vector<Mention> out;
  if (lexicon.empty()) return out;
  const std::string lower = enc::to_lower(text);
  const std::size_t n = lower.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t best = 0;
    const std::string* slot = nullptr;
    for (std::size_t len = std::min(lexicon.longest_, n - i); len > 0; --len) {
      const std::string_view cand(lower.data() + i, len);
      if (i > 0 && is_word(lower[i - 1]) && is_word(cand.front())) continue;
      if (i + len < n && is_word(lower[i + len]) && is_word(cand.back())) continue;
      if (auto it = lexicon.values_.find(std::string(cand)); it != lexicon.values_.end()) {
        best = len;
        slot = &it->second;
        break;
      }
    }
    if (slot) {
      out.push_back({*slot, std::string(text.substr(i, best)), i, i + best});
      i += best;
    } else {
      ++i;
    }
  }
  return out;
}

std::string delexicalize(std::string_view text, const std::vector<Mention>& mentions) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& m : mentions) {
    out.append(text.substr(pos, m.begin - pos));
    out += "<" + m.slot + ">";
    pos = m.end;
  }
  out.append(text.substr(pos));
  return out;
}

EntityStore::EntityStore(std::vector<std::string> slot_types) : slots_(std::move(slot_types)) {}

bool EntityStore::has_slot(std::string_view slot) const {
  return std::find(slots_.begin(), slots_.end(), slot) != slots_.end();
}

bool EntityStore::present(std::string_view slot) const { return values_.find(slot) != values_.end(); }

const std::string* EntityStore::value(std::string_view slot) const {
  auto it = values_.find(slot);
  return it == values_.end() ? nullptr : &it->second;
}

void EntityStore::set(std::string_view slot, std::string value) {
  if (!has_slot(slot) || value.empty()) return;
  values_.insert_or_assign(std::string(slot), std::move(value));
}

void EntityStore::clear() { values_.clear(); }

num::Tensor EntityStore::flags() const {
  num::Tensor f = num::Tensor::zeros(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (present(slots_[i])) f[i] = 1.0;
  return f;
}

num::Tensor entity_track(EntityStore& store, const std::vector<Mention>& mentions) {
  for (const auto& m : mentions) store.set(m.slot, m.surface);
  return store.flags();
}

std::string entity_output(std::string_view templ, const EntityStore& store) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '<') {
      const std::size_t close = templ.find('>', i + 1);
      if (close != std::string_view::npos && enc::is_placeholder(templ.substr(i, close - i + 1))) {
        if (const std::string* v = store.value(templ.substr(i + 1, close - i - 1))) {
          out += *v;
          i = close + 1;
          continue;
        }
      }
    }
    out += templ[i++];
  }
  return out;
}

}  // namespace teachbot::model

#include "teachbot/model/catalog.hpp"

#include "teachbot/encoder/sentence_encoder.hpp"
#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"

namespace teachbot::model {

bool is_api_text(std::string_view text) {
  const auto tokens = enc::tokenize(text);
  return !tokens.empty() && tokens.front() == "api_call";
}

ActionCatalog::ActionCatalog(const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (find(t)) throw ArgumentError("catalog: duplicate template '" + t + "'");
    add(t);
  }
}

std::size_t ActionCatalog::add(std::string_view text) {
  std::string norm = enc::normalize(text);
  if (auto it = index_.find(norm); it != index_.end()) return it->second;
  const std::size_t id = items_.size();
  items_.push_back({id, norm, is_api_text(norm)});
  index_.emplace(std::move(norm), id);
  return id;
}

std::optional<std::size_t> ActionCatalog::find(std::string_view text) const {
  auto it = index_.find(enc::normalize(text));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ActionCatalog::texts() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& t : items_) out.push_back(t.text);
  return out;
}

std::vector<std::size_t> ActionCatalog::all_ids() const {
  std::vector<std::size_t> out(items_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::uint64_t ActionCatalog::fingerprint() const {
  std::string joined;
  for (const auto& t : items_) {
    joined += t.text;
    joined += '\n';
  }
  return enc::fnv1a(joined);
}

}  // namespace teachbot::model

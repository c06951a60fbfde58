#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace teachbot::enc {

/// Token <-> index map. Index 0 is padding and index 1 the unknown token;
/// placeholder tokens (`<slot>`) are ordinary entries added up front.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  std::size_t add(const std::string& token);
  void add_all(const std::vector<std::string>& tokens);
  void add_text(std::string_view text);  // tokenizes first

  std::size_t index(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::vector<std::size_t> indices(const std::vector<std::string>& tokens) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool is_reserved(std::size_t index) const { return index == kPad || index == kUnk; }

  /// One token per line; the line number is the index.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace teachbot::enc

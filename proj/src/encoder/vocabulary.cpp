#include "teachbot/encoder/vocabulary.hpp"

#include <fstream>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"

namespace teachbot::enc {

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

std::size_t Vocabulary::add(const std::string& token) {
  if (token.empty() || token.find_first_of(" \t\r\n") != std::string::npos)
    throw ArgumentError("vocabulary: invalid token '" + token + "'");
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  tokens_.push_back(token);
  index_.emplace(token, tokens_.size() - 1);
  return tokens_.size() - 1;
}

void Vocabulary::add_all(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) add(t);
}

void Vocabulary::add_text(std::string_view text) { add_all(tokenize(text)); }

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::indices(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  Vocabulary v;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (n < 2) {
      if (line != (n == 0 ? kPadToken : kUnkToken))
        throw FormatError(path.string() + ":" + std::to_string(n + 1) + ": reserved token expected");
    } else if (v.add(line) != n) {
      throw FormatError(path.string() + ":" + std::to_string(n + 1) + ": duplicate token '" + line + "'");
    }
    ++n;
  }
  return v;
}

}  // namespace teachbot::enc

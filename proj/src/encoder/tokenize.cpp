#include "teachbot/encoder/tokenize.hpp"

#include <cctype>

namespace teachbot::enc {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
// Non-ASCII bytes are treated as word characters so UTF-8 sequences stay intact.
bool is_name_char(char c) { return is_alnum(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80; }

// Length of a placeholder starting at text[i], or 0.
std::size_t placeholder_length(std::string_view text, std::size_t i) {
  if (text[i] != '<') return 0;
  std::size_t j = i + 1;
  while (j < text.size() && (is_alnum(text[j]) || text[j] == '_')) ++j;
  if (j == i + 1 || j >= text.size() || text[j] != '>') return 0;
  return j - i + 1;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

bool is_placeholder(std::string_view token) {
  return token.size() >= 3 && placeholder_length(token, 0) == token.size();
}

std::vector<std::string> tokenize(std::string_view raw) {
  const std::string text = to_lower(raw);
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (const std::size_t n = placeholder_length(text, i); n > 0) {
      flush();
      tokens.emplace_back(text.substr(i, n));
      i += n - 1;
      continue;
    }
    if (is_name_char(c)) {
      word.push_back(c);
      continue;
    }
    const char prev = i > 0 ? text[i - 1] : ' ';
    const char next = i + 1 < text.size() ? text[i + 1] : ' ';
    const bool inside_word = !word.empty() && is_alnum(prev) && is_alnum(next);
    const bool inside_number = inside_word && is_digit(prev) && is_digit(next);
    if ((c == '\'' || c == '-') && inside_word) {
      word.push_back(c);
      continue;
    }
    if ((c == '.' || c == ',' || c == ':' || c == '/') && inside_number) {
      word.push_back(c);
      continue;
    }
    flush();
    tokens.emplace_back(1, c);
  }
  flush();
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string normalize(std::string_view text) { return join(tokenize(text)); }

}  // namespace teachbot::enc

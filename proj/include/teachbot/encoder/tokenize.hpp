#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace teachbot::enc {

/// Lowercases, splits on whitespace and detaches punctuation. Placeholders
/// such as `<cuisine>` stay one token; apostrophes and hyphens inside words
/// and separators inside numbers ("10:30", "3.5") are kept.
std::vector<std::string> tokenize(std::string_view text);

/// tokenize() joined by single spaces.
std::string normalize(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

/// True for `<name>` with name in [a-z0-9_]+.
bool is_placeholder(std::string_view token);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

}  // namespace teachbot::enc

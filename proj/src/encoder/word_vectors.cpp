#include "teachbot/encoder/word_vectors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "teachbot/error.hpp"

namespace teachbot::enc {

num::Tensor random_word_table(std::size_t vocab_size, std::size_t dim, num::Rng& rng) {
  num::Tensor t(num::Shape{vocab_size, dim});
  num::fill_uniform(t, -0.1, 0.1, rng);
  return t;
}

WordEmbeddingTable load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                                     num::Rng& rng) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word vectors " + path.string());

  WordEmbeddingTable out{random_word_table(vocab.size(), dim, rng)};
  std::vector<bool> seen(vocab.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + field + "' as a number");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                        " values for '" + token + "', found " + std::to_string(values.size()));
    }
    if (!vocab.contains(token)) continue;
    const std::size_t row = vocab.index(token);
    auto dst = out.table.row(row);
    std::copy(values.begin(), values.end(), dst.begin());
    seen[row] = true;
  }

  std::size_t eligible = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab.is_reserved(i)) continue;
    ++eligible;
    if (seen[i]) ++out.found;
  }
  out.coverage = eligible == 0 ? 0.0 : static_cast<double>(out.found) / static_cast<double>(eligible);
  return out;
}

}  // namespace teachbot::enc

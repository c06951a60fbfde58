#pragma once

#include <filesystem>

#include "teachbot/encoder/vocabulary.hpp"
#include "teachbot/numcore/random.hpp"
#include "teachbot/numcore/tensor.hpp"

namespace teachbot::enc {

struct WordEmbeddingTable {
  num::Tensor table;      // |V| x dim
  double coverage = 0.0;  // fraction of non-reserved tokens found in the file
  std::size_t found = 0;
};

/// Uniform [-0.1, 0.1] initialization used for every row not taken from a
/// pretrained file.
num::Tensor random_word_table(std::size_t vocab_size, std::size_t dim, num::Rng& rng);

/// Reads a GloVe-style text file: each line is a token followed by `dim`
/// space-separated floats. Rows for tokens outside the vocabulary are
/// ignored; vocabulary tokens missing from the file keep their random init.
/// Non-numeric fields raise ParseError and a wrong field count FormatError,
/// both naming the line.
WordEmbeddingTable load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                                     num::Rng& rng);

}  // namespace teachbot::enc

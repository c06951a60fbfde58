#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "teachbot/encoder/vocabulary.hpp"
#include "teachbot/numcore/graph.hpp"
#include "teachbot/numcore/parameter.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::enc {

/// Maps a token sequence to a fixed-size embedding on a graph.
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;

  virtual std::size_t dim() const = 0;
  /// Empty input encodes to the zero vector.
  virtual num::Var encode(num::Graph& g, const std::vector<std::string>& tokens) const = 0;

  num::Var encode_text(num::Graph& g, std::string_view text) const;
  num::Tensor embed(std::string_view text) const;  // value only, no gradient
};

struct EncoderDims {
  std::size_t word_dim = 100;
  std::size_t hidden = 100;  // per direction

  std::size_t output() const { return 2 * hidden; }
};

/// Bidirectional LSTM over word embeddings; the sentence embedding is the
/// final forward state concatenated with the final backward state.
class BiLstmEncoder : public SentenceEncoder {
 public:
  struct Params {
    num::Parameter* embeddings = nullptr;  // |V| x word_dim
    num::Parameter* fwd_w = nullptr;       // 4H x (word_dim + H)
    num::Parameter* fwd_b = nullptr;
    num::Parameter* bwd_w = nullptr;
    num::Parameter* bwd_b = nullptr;
  };

  /// Registers "sent.emb", "sent.fwd.w", "sent.fwd.b", "sent.bwd.w" and
  /// "sent.bwd.b". Recurrent weights are Xavier-uniform, biases zero and
  /// embeddings uniform in [-0.1, 0.1] unless `pretrained` is given.
  static Params create(num::ParameterSet& params, std::size_t vocab_size, EncoderDims dims, num::Rng& rng,
                       const num::Tensor* pretrained = nullptr);
  static Params bind(num::ParameterSet& params);

  BiLstmEncoder(const Vocabulary& vocab, Params params);

  std::size_t dim() const override { return 2 * hidden_; }
  num::Var encode(num::Graph& g, const std::vector<std::string>& tokens) const override;

 private:
  const Vocabulary* vocab_;
  Params p_;
  std::size_t hidden_;
};

/// Parameter-free encoder for tests: every distinct normalized text maps to
/// a unit basis vector, chosen by a stable FNV-1a hash modulo dim unless
/// pinned explicitly.
class StubEncoder : public SentenceEncoder {
 public:
  explicit StubEncoder(std::size_t dim) : dim_(dim) {}

  void pin(std::string_view text, std::size_t axis);
  std::size_t axis(std::string_view text) const;

  std::size_t dim() const override { return dim_; }
  num::Var encode(num::Graph& g, const std::vector<std::string>& tokens) const override;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t> pinned_;
};

std::uint64_t fnv1a(std::string_view text);

/// Row k is the encoding of texts[k]. Throws on an empty list.
num::Var encode_catalog(num::Graph& g, const SentenceEncoder& encoder, const std::vector<std::string>& texts);
num::Tensor encode_catalog(const SentenceEncoder& encoder, const std::vector<std::string>& texts);

}  // namespace teachbot::enc

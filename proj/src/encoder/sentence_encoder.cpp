#include "teachbot/encoder/sentence_encoder.hpp"

#include <array>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/encoder/word_vectors.hpp"
#include "teachbot/error.hpp"
#include "teachbot/numcore/functions.hpp"

namespace teachbot::enc {

num::Var SentenceEncoder::encode_text(num::Graph& g, std::string_view text) const {
  return encode(g, tokenize(text));
}

num::Tensor SentenceEncoder::embed(std::string_view text) const {
  num::Graph g;
  return encode_text(g, text).value();
}

BiLstmEncoder::Params BiLstmEncoder::create(num::ParameterSet& params, std::size_t vocab_size, EncoderDims dims,
                                            num::Rng& rng, const num::Tensor* pretrained) {
  if (dims.word_dim == 0 || dims.hidden == 0) throw ArgumentError("encoder dimensions must be positive");
  num::Tensor emb;
  if (pretrained) {
    if (pretrained->shape() != num::Shape{vocab_size, dims.word_dim})
      throw ArgumentError("pretrained embedding table has shape " + num::shape_string(pretrained->shape()));
    emb = *pretrained;
  } else {
    emb = random_word_table(vocab_size, dims.word_dim, rng);
  }
  Params p;
  p.embeddings = &params.add("sent.emb", std::move(emb));
  const std::size_t fan_in = dims.word_dim + dims.hidden;
  p.fwd_w = &params.add("sent.fwd.w", num::xavier_uniform(fan_in, 4 * dims.hidden, rng));
  p.fwd_b = &params.add("sent.fwd.b", num::Tensor(num::Shape{4 * dims.hidden}));
  p.bwd_w = &params.add("sent.bwd.w", num::xavier_uniform(fan_in, 4 * dims.hidden, rng));
  p.bwd_b = &params.add("sent.bwd.b", num::Tensor(num::Shape{4 * dims.hidden}));
  return p;
}

BiLstmEncoder::Params BiLstmEncoder::bind(num::ParameterSet& params) {
  return {&params.get("sent.emb"), &params.get("sent.fwd.w"), &params.get("sent.fwd.b"), &params.get("sent.bwd.w"),
          &params.get("sent.bwd.b")};
}

BiLstmEncoder::BiLstmEncoder(const Vocabulary& vocab, Params params)
    : vocab_(&vocab), p_(params), hidden_(params.fwd_b->value.size() / 4) {
  if (p_.embeddings->value.rows() != vocab.size()) {
    throw ArgumentError("embedding table has " + std::to_string(p_.embeddings->value.rows()) +
                        " rows for a vocabulary of " + std::to_string(vocab.size()));
  }
}

num::Var BiLstmEncoder::encode(num::Graph& g, const std::vector<std::string>& tokens) const {
  if (tokens.empty()) return g.constant(num::Tensor::zeros(dim()));
  std::vector<num::Var> words;
  words.reserve(tokens.size());
  for (std::size_t idx : vocab_->indices(tokens)) words.push_back(g.lookup(*p_.embeddings, idx));

  const num::Var zero = g.constant(num::Tensor::zeros(hidden_));
  auto run = [&](num::Parameter* w, num::Parameter* b, bool reverse) {
    num::LstmVars s{zero, zero};
    const num::Var wv = g.param(*w);
    const num::Var bv = g.param(*b);
    for (std::size_t t = 0; t < words.size(); ++t) {
      const num::Var x = words[reverse ? words.size() - 1 - t : t];
      s = num::lstm_step(x, s.h, s.c, wv, bv);
    }
    return s.h;
  };
  const std::array<num::Var, 2> halves{run(p_.fwd_w, p_.fwd_b, false), run(p_.bwd_w, p_.bwd_b, true)};
  return num::concat(halves);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void StubEncoder::pin(std::string_view text, std::size_t axis) {
  if (axis >= dim_) throw ArgumentError("stub encoder: axis " + std::to_string(axis) + " out of range");
  pinned_[normalize(text)] = axis;
}

std::size_t StubEncoder::axis(std::string_view text) const {
  const std::string key = normalize(text);
  if (auto it = pinned_.find(key); it != pinned_.end()) return it->second;
  return fnv1a(key) % dim_;
}

num::Var StubEncoder::encode(num::Graph& g, const std::vector<std::string>& tokens) const {
  num::Tensor v = num::Tensor::zeros(dim_);
  if (!tokens.empty()) v[axis(join(tokens))] = 1.0;
  return g.constant(std::move(v));
}

num::Var encode_catalog(num::Graph& g, const SentenceEncoder& encoder, const std::vector<std::string>& texts) {
  if (texts.empty()) throw ArgumentError("encode_catalog: empty catalog");
  std::vector<num::Var> rows;
  rows.reserve(texts.size());
  for (const auto& t : texts) rows.push_back(encoder.encode_text(g, t));
  return num::stack(rows);
}

num::Tensor encode_catalog(const SentenceEncoder& encoder, const std::vector<std::string>& texts) {
  num::Graph g;
  return encode_catalog(g, encoder, texts).value();
}

}  // namespace teachbot::enc

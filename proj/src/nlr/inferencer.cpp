#include "teachbot/nlr/inferencer.hpp"

#include <array>
#include <cmath>

#include "teachbot/error.hpp"

namespace teachbot::nlr {

namespace {

std::string prefix(RuleKind kind) { return "nlr." + std::string(kind_name(kind)) + "."; }

num::Var lambda_var(num::Graph& g, const MatcherParams& m) { return num::exp(g.param(*m.log_lambda)); }

}  // namespace

MatcherParams MatcherParams::create(num::ParameterSet& params, RuleKind kind, double lambda_init,
                                    std::size_t nomatch_slots) {
  if (!(lambda_init > 0.0)) throw ArgumentError("matcher: lambda must be positive");
  if (nomatch_slots == 0) throw ArgumentError("matcher: at least one no-match slot is required");
  const std::string p = prefix(kind);
  MatcherParams m;
  m.log_lambda = &params.add(p + "log_lambda", num::Tensor::scalar(std::log(lambda_init)));
  m.pre_bias = &params.add(p + "pre_bias", num::Tensor::zeros(nomatch_slots));
  m.post_bias = &params.add(p + "post_bias", num::Tensor::zeros(nomatch_slots));
  return m;
}

MatcherParams MatcherParams::bind(num::ParameterSet& params, RuleKind kind) {
  const std::string p = prefix(kind);
  return {&params.get(p + "log_lambda"), &params.get(p + "pre_bias"), &params.get(p + "post_bias")};
}

double MatcherParams::lambda() const { return std::exp(log_lambda->value.item()); }

RuleMemory build_rule_memory(num::Graph& g, const RuleSet& rules, const enc::SentenceEncoder& encoder) {
  RuleMemory m;
  m.rules = rules.size();
  if (rules.empty()) return m;
  std::vector<num::Var> pre, post;
  for (const auto& r : rules.rules) {
    pre.push_back(encoder.encode_text(g, r.pre));
    post.push_back(encoder.encode_text(g, r.post));
  }
  m.pre = num::stack(pre);
  m.post = num::stack(post);
  return m;
}

num::Var match_probs(num::Var query, const std::optional<num::Var>& rows, num::Var lambda, num::Var nomatch_bias) {
  if (lambda.value().size() != 1 || !(lambda.scalar() > 0.0)) throw ArgumentError("match_probs: lambda must be > 0");
  if (!rows) return num::softmax(nomatch_bias);
  const std::array<num::Var, 2> logits{num::divide(num::cosine_rows(query, *rows), lambda), nomatch_bias};
  return num::softmax(num::concat(logits));
}

num::Var rule_relevance(num::Var input, const RuleMemory& memory, const MatcherParams& matcher) {
  num::Graph& g = *input.graph;
  return match_probs(input, memory.pre, lambda_var(g, matcher), g.param(*matcher.pre_bias));
}

std::optional<num::Var> action_affinity(const RuleMemory& memory, num::Var candidates, const MatcherParams& matcher) {
  if (memory.rules == 0) return std::nullopt;
  num::Graph& g = *candidates.graph;
  const num::Var lambda = lambda_var(g, matcher);
  const num::Var bias = g.param(*matcher.post_bias);
  std::vector<num::Var> rows;
  rows.reserve(memory.rules);
  for (std::size_t i = 0; i < memory.rules; ++i)
    rows.push_back(match_probs(num::row(*memory.post, i), candidates, lambda, bias));
  return num::stack(rows);
}

Combined combine(num::Var mu, const std::optional<num::Var>& nu, std::size_t rules, std::size_t candidates) {
  num::Graph& g = *mu.graph;
  if (mu.size() <= rules) {
    throw ArgumentError("combine: mu has " + std::to_string(mu.size()) + " entries for " + std::to_string(rules) +
                        " rules");
  }
  const std::size_t mu_slots = mu.size() - rules;
  const num::Var mu_nomatch = num::sum(num::slice(mu, rules, mu_slots));
  if (rules == 0) {
    if (nu) throw ArgumentError("combine: nu given for an empty rule set");
    return {g.constant(num::Tensor::zeros(candidates)), mu_nomatch};
  }
  if (!nu || nu->value().rank() != 2 || nu->value().rows() != rules || nu->value().cols() <= candidates) {
    throw ArgumentError("combine: nu must be " + std::to_string(rules) + " x (" + std::to_string(candidates) +
                        " + no-match)");
  }
  const std::size_t nu_slots = nu->value().cols() - candidates;
  // Row-weighted sum of nu: w_j = sum_i mu_i nu_ij.
  const num::Var weighted = num::matvec_t(*nu, num::slice(mu, 0, rules));
  const num::Var alpha = num::slice(weighted, 0, candidates);
  const num::Var zero_mass = num::add(mu_nomatch, num::sum(num::slice(weighted, candidates, nu_slots)));
  return {alpha, zero_mass};
}

num::Var expected_action(num::Var alpha, num::Var candidates) { return num::matvec_t(candidates, alpha); }

RuleSetInference infer(num::Var input, const RuleMemory& memory, num::Var candidates, const MatcherParams& matcher) {
  const std::size_t k = candidates.value().rows();
  RuleSetInference r{rule_relevance(input, memory, matcher), action_affinity(memory, candidates, matcher), {}, {}};
  r.combined = combine(r.mu, r.nu, memory.rules, k);
  r.embedding = expected_action(r.combined.alpha, candidates);
  check_normalization(r);
  return r;
}

void check_normalization(const RuleSetInference& r, double tol) {
  auto in_unit = [&](double v) { return v >= -tol && v <= 1.0 + tol; };
  auto fail = [](const std::string& what) { throw NumericError("nlr normalization violated: " + what); };
  double s = 0.0;
  for (double v : r.mu.value().values()) {
    if (!in_unit(v)) fail("mu entry outside [0,1]");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) fail("sum(mu) = " + std::to_string(s));
  if (r.nu) {
    const num::Tensor& nu = r.nu->value();
    for (std::size_t i = 0; i < nu.rows(); ++i) {
      double rs = 0.0;
      for (double v : nu.row(i)) {
        if (!in_unit(v)) fail("nu entry outside [0,1]");
        rs += v;
      }
      if (std::abs(rs - 1.0) > tol) fail("nu row " + std::to_string(i) + " sums to " + std::to_string(rs));
    }
  }
  double total = r.combined.zero_mass.scalar();
  if (!in_unit(total)) fail("zero mass outside [0,1]");
  for (double v : r.combined.alpha.value().values()) {
    if (!in_unit(v)) fail("alpha entry outside [0,1]");
    total += v;
  }
  if (std::abs(total - 1.0) > tol) fail("sum(alpha) + zero mass = " + std::to_string(total));
}

NlrOutput nlr_features(num::Graph& g, const NlrInputs& in, const RuleMemory& s_memory, const RuleMemory& u_memory,
                       const MatcherParams& s_matcher, const MatcherParams& u_matcher, bool use_s, bool use_u) {
  const std::size_t d = in.candidates.value().cols();
  NlrOutput out;
  std::array<num::Var, 2> halves{};
  if (use_s) {
    out.s = infer(in.prev_system, s_memory, in.candidates, s_matcher);
    halves[0] = out.s->embedding;
  } else {
    halves[0] = g.constant(num::Tensor::zeros(d));
  }
  if (use_u) {
    out.u = infer(in.user, u_memory, in.candidates, u_matcher);
    halves[1] = out.u->embedding;
  } else {
    halves[1] = g.constant(num::Tensor::zeros(d));
  }
  out.features = num::concat(halves);
  return out;
}

}  // namespace teachbot::nlr

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teachbot/encoder/sentence_encoder.hpp"
#include "teachbot/nlr/rules.hpp"
#include "teachbot/numcore/graph.hpp"
#include "teachbot/numcore/parameter.hpp"

namespace teachbot::nlr {

/// Temperature and no-match logits for one rule set. The temperature is
/// stored as log(lambda) so lambda stays positive under any update; each of
/// the two matching processes (pre-side, post-side) gets its own no-match
/// bias vector of `nomatch_slots` entries (1 by default).
struct MatcherParams {
  num::Parameter* log_lambda = nullptr;  // scalar
  num::Parameter* pre_bias = nullptr;    // [nomatch_slots]
  num::Parameter* post_bias = nullptr;   // [nomatch_slots]

  /// Registers "nlr.<s|u>.log_lambda", "nlr.<s|u>.pre_bias", "nlr.<s|u>.post_bias".
  static MatcherParams create(num::ParameterSet& params, RuleKind kind, double lambda_init = 0.1,
                              std::size_t nomatch_slots = 1);
  static MatcherParams bind(num::ParameterSet& params, RuleKind kind);

  double lambda() const;
  std::size_t nomatch_slots() const { return pre_bias->value.size(); }
};

/// Graph-resident encodings of a rule set's conditions (R x d each); both
/// are absent when the rule set is empty.
struct RuleMemory {
  std::size_t rules = 0;
  std::optional<num::Var> pre;
  std::optional<num::Var> post;
};

RuleMemory build_rule_memory(num::Graph& g, const RuleSet& rules, const enc::SentenceEncoder& encoder);

/// softmax([cosine(query, row_i) / lambda]_i ++ nomatch_bias). The trailing
/// entries are the no-match probabilities, whose associated embedding is
/// the zero vector. With no rows all mass goes to no-match.
num::Var match_probs(num::Var query, const std::optional<num::Var>& rows, num::Var lambda, num::Var nomatch_bias);

/// mu: relevance of every rule to the inferencer input (R + slots).
num::Var rule_relevance(num::Var input, const RuleMemory& memory, const MatcherParams& matcher);

/// nu: one row per rule, matching its post-condition against every
/// candidate (R x (K + slots)). Absent for an empty rule set.
std::optional<num::Var> action_affinity(const RuleMemory& memory, num::Var candidates, const MatcherParams& matcher);

struct Combined {
  num::Var alpha;      // K
  num::Var zero_mass;  // scalar: mass routed to the zero vector
};

/// alpha_j = sum_i mu_i nu_ij over real rules and real candidates; every
/// no-match entry of mu and nu lands in zero_mass.
Combined combine(num::Var mu, const std::optional<num::Var>& nu, std::size_t rules, std::size_t candidates);

/// e = sum_j alpha_j candidate_j.
num::Var expected_action(num::Var alpha, num::Var candidates);

/// Everything one rule set produced on one turn.
struct RuleSetInference {
  num::Var mu;
  std::optional<num::Var> nu;
  Combined combined;
  num::Var embedding;  // e_s or e_u
};

RuleSetInference infer(num::Var input, const RuleMemory& memory, num::Var candidates, const MatcherParams& matcher);

/// Throws NumericError unless sum(mu) = 1, every nu row sums to 1 and
/// sum(alpha) + zero_mass = 1, all within `tol`, with entries in [0, 1].
void check_normalization(const RuleSetInference& r, double tol = 1e-9);

struct NlrInputs {
  num::Var prev_system;  // s-rule query
  num::Var user;         // u-rule query
  num::Var candidates;   // K x d
};

struct NlrOutput {
  num::Var features;  // [e_s; e_u], 2d
  std::optional<RuleSetInference> s;
  std::optional<RuleSetInference> u;
};

/// Runs both rule sets and concatenates e_s and e_u. A disabled rule set
/// contributes a zero block of the same width, so the layout never changes.
NlrOutput nlr_features(num::Graph& g, const NlrInputs& in, const RuleMemory& s_memory, const RuleMemory& u_memory,
                       const MatcherParams& s_matcher, const MatcherParams& u_matcher, bool use_s = true,
                       bool use_u = true);

}  // namespace teachbot::nlr

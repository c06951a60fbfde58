#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "teachbot/encoder/sentence_encoder.hpp"
#include "teachbot/encoder/vocabulary.hpp"
#include "teachbot/model/catalog.hpp"
#include "teachbot/model/entities.hpp"
#include "teachbot/nlr/inferencer.hpp"
#include "teachbot/nlr/rules.hpp"
#include "teachbot/numcore/graph.hpp"
#include "teachbot/numcore/parameter.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::model {

/// Which rule sets feed the feature vector. Disabled sets contribute a zero
/// block, so every variant shares one parameter layout.
enum class Variant { Nlr, NlrS, NlrU, NlrSU };

Variant parse_variant(std::string_view name);  // "NLR", "NLR-S", "NLR-U", "NLR-SU"
std::string variant_name(Variant v);
inline bool uses_s_rules(Variant v) { return v == Variant::Nlr || v == Variant::NlrU; }
inline bool uses_u_rules(Variant v) { return v == Variant::Nlr || v == Variant::NlrS; }

enum class EncoderKind { BiLstm, Stub };
enum class ScoreKind { Cosine, Dot };

struct ModelConfig {
  EncoderKind encoder = EncoderKind::BiLstm;
  enc::EncoderDims dims;
  std::size_t stub_dim = 200;
  std::size_t context_hidden = 200;
  double tau_init = 0.1;
  double lambda_init = 0.1;
  std::size_t nomatch_slots = 1;
  ScoreKind score = ScoreKind::Cosine;
  std::size_t api_dim = 0;
  Variant variant = Variant::Nlr;
};

std::string config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const std::string& json);

struct DialogState {
  num::Tensor h;  // context recurrence
  num::Tensor c;
  EntityStore entities;
  std::string prev_action;  // empty on the first turn
  std::vector<double> api_features;
  std::size_t turns = 0;
};

using ApiCallback = std::function<std::vector<double>(const ActionTemplate&, const DialogState&)>;

/// Callbacks keyed by template id.
class ApiRegistry {
 public:
  void set(std::size_t template_id, ApiCallback cb);
  bool has(std::size_t template_id) const { return callbacks_.count(template_id) != 0; }
  const ApiCallback& get(std::size_t template_id) const;
  // Registers a callback returning `dim` zeros for every API template.
  static ApiRegistry stubs(const ActionCatalog& catalog, std::size_t dim);

 private:
  std::map<std::size_t, ApiCallback> callbacks_;
};

/// Runs the callback of an API template and stores its features in the
/// state. Non-API templates leave the state untouched.
void api_dispatch(const ActionTemplate& action, DialogState& state, const ApiRegistry& registry, std::size_t api_dim);

/// Argmax; ties go to the lowest template id (the position when `ids` is
/// empty). Returns a position.
std::size_t select_action(std::span<const double> distribution, std::span<const std::size_t> ids = {});

class Model {
 public:
  /// Builds freshly initialized parameters. `pretrained` replaces the random
  /// word table of the BiLSTM encoder.
  Model(ModelConfig config, enc::Vocabulary vocab, std::vector<std::string> slot_types, ActionCatalog catalog,
        num::Rng& rng, const num::Tensor* pretrained = nullptr);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  void set_variant(Variant v) { config_.variant = v; }
  num::ParameterSet& params() { return params_; }
  const num::ParameterSet& params() const { return params_; }
  const enc::Vocabulary& vocab() const { return vocab_; }
  const std::vector<std::string>& slot_types() const { return slot_types_; }
  const ActionCatalog& catalog() const { return catalog_; }
  const enc::SentenceEncoder& encoder() const { return *encoder_; }
  // Swaps in a parameter-free encoder of the same dimension (tests).
  void set_encoder(std::shared_ptr<const enc::SentenceEncoder> encoder);
  const nlr::RuleBook& rules() const { return rules_; }
  void set_rules(nlr::RuleBook rules) { rules_ = std::move(rules); }
  ApiRegistry& api() { return api_; }
  const ApiRegistry& api() const { return api_; }

  std::size_t sentence_dim() const { return encoder_->dim(); }
  std::size_t feature_dim() const;
  const nlr::MatcherParams& s_matcher() const { return s_matcher_; }
  const nlr::MatcherParams& u_matcher() const { return u_matcher_; }
  num::Parameter& ctx_w() const { return *ctx_w_; }
  num::Parameter& ctx_b() const { return *ctx_b_; }
  num::Parameter& proj_w() const { return *proj_w_; }
  num::Parameter& proj_b() const { return *proj_b_; }
  num::Parameter& log_tau() const { return *log_tau_; }

  DialogState initial_state() const;

  /// Writes `model.json` (config, vocabulary, slot types, catalog) and
  /// `params.ckpt` into `dir`.
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<Model> load(const std::filesystem::path& dir);

 private:
  void bind_parameters();

  ModelConfig config_;
  enc::Vocabulary vocab_;
  std::vector<std::string> slot_types_;
  ActionCatalog catalog_;
  num::ParameterSet params_;
  std::shared_ptr<const enc::SentenceEncoder> encoder_;
  nlr::MatcherParams s_matcher_;
  nlr::MatcherParams u_matcher_;
  num::Parameter* ctx_w_ = nullptr;
  num::Parameter* ctx_b_ = nullptr;
  num::Parameter* proj_w_ = nullptr;
  num::Parameter* proj_b_ = nullptr;
  num::Parameter* log_tau_ = nullptr;
  nlr::RuleBook rules_;
  ApiRegistry api_;
};

struct TurnInput {
  std::string user;  // delexicalized user text
  std::vector<Mention> mentions;
  std::vector<std::size_t> candidates;  // catalog ids, non-empty
  // Action recorded in the data. When set it becomes the next turn's
  // previous action instead of the model's own choice.
  std::optional<std::size_t> taken;
};

struct TurnResult {
  num::Var features;
  num::Var scores;
  num::Var probs;
  nlr::NlrOutput nlr;
  std::vector<std::size_t> candidates;
  std::size_t selected = 0;  // catalog id
};

/// One dialog's forward computation on a single graph. Sentence encodings
/// and rule memories are computed once per pass and shared by all turns;
/// the context recurrence is threaded through the graph so a dialog loss
/// backpropagates through every turn. The state is written back after each
/// turn.
class DialogPass {
 public:
  DialogPass(const Model& model, num::Graph& graph, DialogState& state);

  TurnResult turn(const TurnInput& input);

  num::Var encode(const std::string& text);
  const nlr::RuleMemory& s_memory();
  const nlr::RuleMemory& u_memory();

 private:
  const Model& model_;
  num::Graph& g_;
  DialogState& state_;
  num::Var h_;
  num::Var c_;
  std::unordered_map<std::string, num::Var> encoded_;
  std::optional<nlr::RuleMemory> s_memory_;
  std::optional<nlr::RuleMemory> u_memory_;
};

/// Probabilities of a single turn on a throwaway graph.
std::vector<double> turn_forward(const Model& model, DialogState& state, const TurnInput& input);

}  // namespace teachbot::model

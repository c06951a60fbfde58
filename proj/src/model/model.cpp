#include "teachbot/model/model.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"
#include "teachbot/numcore/checkpoint.hpp"
#include "teachbot/numcore/functions.hpp"

namespace teachbot::model {

using nlohmann::json;

Variant parse_variant(std::string_view name) {
  if (name == "NLR") return Variant::Nlr;
  if (name == "NLR-S") return Variant::NlrS;
  if (name == "NLR-U") return Variant::NlrU;
  if (name == "NLR-SU") return Variant::NlrSU;
  throw ArgumentError("unknown variant '" + std::string(name) + "' (expected NLR, NLR-S, NLR-U or NLR-SU)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Nlr: return "NLR";
    case Variant::NlrS: return "NLR-S";
    case Variant::NlrU: return "NLR-U";
    case Variant::NlrSU: return "NLR-SU";
  }
  return "?";
}

namespace {

json config_json(const ModelConfig& c) {
  return {{"encoder", c.encoder == EncoderKind::BiLstm ? "bilstm" : "stub"},
          {"word_dim", c.dims.word_dim},
          {"hidden", c.dims.hidden},
          {"stub_dim", c.stub_dim},
          {"context_hidden", c.context_hidden},
          {"tau_init", c.tau_init},
          {"lambda_init", c.lambda_init},
          {"nomatch_slots", c.nomatch_slots},
          {"score", c.score == ScoreKind::Cosine ? "cosine" : "dot"},
          {"api_dim", c.api_dim},
          {"variant", variant_name(c.variant)}};
}

ModelConfig config_of(const json& j) {
  ModelConfig c;
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "encoder") {
      const auto s = value.get<std::string>();
      if (s == "bilstm") c.encoder = EncoderKind::BiLstm;
      else if (s == "stub") c.encoder = EncoderKind::Stub;
      else throw ConfigError("model config: unknown encoder '" + s + "'");
    } else if (key == "word_dim") {
      c.dims.word_dim = value.get<std::size_t>();
    } else if (key == "hidden") {
      c.dims.hidden = value.get<std::size_t>();
    } else if (key == "stub_dim") {
      c.stub_dim = value.get<std::size_t>();
    } else if (key == "context_hidden") {
      c.context_hidden = value.get<std::size_t>();
    } else if (key == "tau_init") {
      c.tau_init = value.get<double>();
    } else if (key == "lambda_init") {
      c.lambda_init = value.get<double>();
    } else if (key == "nomatch_slots") {
      c.nomatch_slots = value.get<std::size_t>();
    } else if (key == "score") {
      const auto s = value.get<std::string>();
      if (s == "cosine") c.score = ScoreKind::Cosine;
      else if (s == "dot") c.score = ScoreKind::Dot;
      else throw ConfigError("model config: unknown score '" + s + "'");
    } else if (key == "api_dim") {
      c.api_dim = value.get<std::size_t>();
    } else if (key == "variant") {
      c.variant = parse_variant(value.get<std::string>());
    } else {
      throw ConfigError("model config: unknown key '" + key + "'");
    }
  }
  if (c.context_hidden == 0 || c.stub_dim == 0) throw ConfigError("model config: dimensions must be positive");
  if (!(c.tau_init > 0) || !(c.lambda_init > 0)) throw ConfigError("model config: tau and lambda must be positive");
  return c;
}

}  // namespace

std::string config_to_json(const ModelConfig& c) { return config_json(c).dump(2); }

ModelConfig config_from_json(const std::string& text) {
  try {
    return config_of(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

// ---- API hooks ----------------------------------------------------------------

void ApiRegistry::set(std::size_t template_id, ApiCallback cb) { callbacks_[template_id] = std::move(cb); }

const ApiCallback& ApiRegistry::get(std::size_t template_id) const {
  auto it = callbacks_.find(template_id);
  if (it == callbacks_.end()) throw ConfigError("no API callback registered for template " + std::to_string(template_id));
  return it->second;
}

ApiRegistry ApiRegistry::stubs(const ActionCatalog& catalog, std::size_t dim) {
  ApiRegistry r;
  for (const auto& t : catalog.items())
    if (t.is_api) r.set(t.id, [dim](const ActionTemplate&, const DialogState&) { return std::vector<double>(dim, 0.0); });
  return r;
}

void api_dispatch(const ActionTemplate& action, DialogState& state, const ApiRegistry& registry, std::size_t api_dim) {
  if (!action.is_api) return;
  auto features = registry.get(action.id)(action, state);
  if (features.size() != api_dim) {
    throw ConfigError("API callback for template " + std::to_string(action.id) + " returned " +
                      std::to_string(features.size()) + " features, expected " + std::to_string(api_dim));
  }
  state.api_features = std::move(features);
}

std::size_t select_action(std::span<const double> distribution, std::span<const std::size_t> ids) {
  if (distribution.empty()) throw ArgumentError("select_action: empty distribution");
  if (!ids.empty() && ids.size() != distribution.size()) throw ArgumentError("select_action: ids/distribution size");
  auto id = [&](std::size_t i) { return ids.empty() ? i : ids[i]; };
  std::size_t best = 0;
  for (std::size_t i = 1; i < distribution.size(); ++i) {
    if (distribution[i] > distribution[best] || (distribution[i] == distribution[best] && id(i) < id(best))) best = i;
  }
  return best;
}

// ---- Model -----------------------------------------------------------------------

Model::Model(ModelConfig config, enc::Vocabulary vocab, std::vector<std::string> slot_types, ActionCatalog catalog,
             num::Rng& rng, const num::Tensor* pretrained)
    : config_(config), vocab_(std::move(vocab)), slot_types_(std::move(slot_types)), catalog_(std::move(catalog)) {
  if (catalog_.empty()) throw ArgumentError("model: empty action catalog");
  if (config_.encoder == EncoderKind::BiLstm) {
    auto p = enc::BiLstmEncoder::create(params_, vocab_.size(), config_.dims, rng, pretrained);
    encoder_ = std::make_shared<enc::BiLstmEncoder>(vocab_, p);
  } else {
    encoder_ = std::make_shared<enc::StubEncoder>(config_.stub_dim);
  }
  const std::size_t d = encoder_->dim();
  const std::size_t hc = config_.context_hidden;
  params_.add("ctx.w", num::xavier_uniform(feature_dim() + hc, 4 * hc, rng));
  params_.add("ctx.b", num::Tensor::zeros(4 * hc));
  params_.add("proj.w", num::xavier_uniform(hc, d, rng));
  params_.add("proj.b", num::Tensor::zeros(d));
  params_.add("rank.log_tau", num::Tensor::scalar(std::log(config_.tau_init)));
  nlr::MatcherParams::create(params_, nlr::RuleKind::System, config_.lambda_init, config_.nomatch_slots);
  nlr::MatcherParams::create(params_, nlr::RuleKind::User, config_.lambda_init, config_.nomatch_slots);
  bind_parameters();
  api_ = ApiRegistry::stubs(catalog_, config_.api_dim);
}

void Model::bind_parameters() {
  ctx_w_ = &params_.get("ctx.w");
  ctx_b_ = &params_.get("ctx.b");
  proj_w_ = &params_.get("proj.w");
  proj_b_ = &params_.get("proj.b");
  log_tau_ = &params_.get("rank.log_tau");
  s_matcher_ = nlr::MatcherParams::bind(params_, nlr::RuleKind::System);
  u_matcher_ = nlr::MatcherParams::bind(params_, nlr::RuleKind::User);
}

void Model::set_encoder(std::shared_ptr<const enc::SentenceEncoder> encoder) {
  if (!encoder || encoder->dim() != encoder_->dim())
    throw ArgumentError("set_encoder: encoder dimension must stay " + std::to_string(encoder_->dim()));
  encoder_ = std::move(encoder);
}

std::size_t Model::feature_dim() const {
  const std::size_t d = encoder_->dim();
  return d + slot_types_.size() + d + 2 * d + config_.api_dim;
}

DialogState Model::initial_state() const {
  DialogState s;
  s.h = num::Tensor::zeros(config_.context_hidden);
  s.c = num::Tensor::zeros(config_.context_hidden);
  s.entities = EntityStore(slot_types_);
  s.api_features.assign(config_.api_dim, 0.0);
  return s;
}

void Model::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  json meta{{"format", "teachbot-model 1"},
            {"config", config_json(config_)},
            {"vocabulary", vocab_.tokens()},
            {"slot_types", slot_types_},
            {"catalog", catalog_.texts()}};
  std::ofstream out(dir / "model.json", std::ios::binary);
  out << meta.dump(1) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "model.json").string());
  out.close();
  num::save_checkpoint(dir / "params.ckpt", params_);
}

std::unique_ptr<Model> Model::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json", std::ios::binary);
  if (!in) throw ConfigError("cannot open " + (dir / "model.json").string());
  json meta;
  try {
    meta = json::parse(in);
    if (meta.at("format").get<std::string>() != "teachbot-model 1") throw ConfigError("unsupported model format");
    const ModelConfig config = config_of(meta.at("config"));
    enc::Vocabulary vocab;
    const auto tokens = meta.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (vocab.add(tokens[i]) != i) throw ConfigError("model.json: inconsistent vocabulary at index " + std::to_string(i));
    }
    ActionCatalog catalog(meta.at("catalog").get<std::vector<std::string>>());
    num::Rng rng(0);
    auto model = std::make_unique<Model>(config, std::move(vocab), meta.at("slot_types").get<std::vector<std::string>>(),
                                         std::move(catalog), rng);
    num::load_checkpoint(dir / "params.ckpt", model->params_);
    return model;
  } catch (const json::exception& e) {
    throw ConfigError("model.json: " + std::string(e.what()));
  }
}

// ---- forward pass ------------------------------------------------------------------

DialogPass::DialogPass(const Model& model, num::Graph& graph, DialogState& state)
    : model_(model), g_(graph), state_(state) {
  if (state.h.size() != model.config().context_hidden || state.c.size() != model.config().context_hidden)
    throw ArgumentError("dialog state does not match the model's context size");
  h_ = g_.constant(state.h);
  c_ = g_.constant(state.c);
}

num::Var DialogPass::encode(const std::string& text) {
  const std::string key = enc::normalize(text);
  if (auto it = encoded_.find(key); it != encoded_.end()) return it->second;
  const num::Var v = model_.encoder().encode_text(g_, key);
  encoded_.emplace(key, v);
  return v;
}

namespace {

nlr::RuleMemory memory_of(DialogPass& pass, const nlr::RuleSet& rules) {
  nlr::RuleMemory m;
  m.rules = rules.size();
  if (rules.empty()) return m;
  std::vector<num::Var> pre, post;
  for (const auto& r : rules.rules) {
    pre.push_back(pass.encode(r.pre));
    post.push_back(pass.encode(r.post));
  }
  m.pre = num::stack(pre);
  m.post = num::stack(post);
  return m;
}

}  // namespace

const nlr::RuleMemory& DialogPass::s_memory() {
  if (!s_memory_) s_memory_ = memory_of(*this, model_.rules().s_rules);
  return *s_memory_;
}

const nlr::RuleMemory& DialogPass::u_memory() {
  if (!u_memory_) u_memory_ = memory_of(*this, model_.rules().u_rules);
  return *u_memory_;
}

TurnResult DialogPass::turn(const TurnInput& input) {
  const ActionCatalog& catalog = model_.catalog();
  if (input.candidates.empty()) throw ArgumentError("turn_forward: empty candidate list");
  for (std::size_t id : input.candidates)
    if (id >= catalog.size()) throw ArgumentError("turn_forward: candidate id " + std::to_string(id) + " out of range");
  if (input.taken && *input.taken >= catalog.size()) throw ArgumentError("turn_forward: taken action out of range");

  const Variant variant = model_.config().variant;
  TurnResult r;
  r.candidates = input.candidates;

  const num::Var user = encode(input.user);
  const num::Var context = g_.constant(entity_track(state_.entities, input.mentions));
  const num::Var prev = encode(state_.prev_action);
  std::vector<num::Var> rows;
  rows.reserve(input.candidates.size());
  for (std::size_t id : input.candidates) rows.push_back(encode(catalog[id].text));
  const num::Var cands = num::stack(rows);

  const bool use_s = uses_s_rules(variant), use_u = uses_u_rules(variant);
  static const nlr::RuleMemory kNone;
  r.nlr = nlr::nlr_features(g_, {prev, user, cands}, use_s ? s_memory() : kNone, use_u ? u_memory() : kNone,
                            model_.s_matcher(), model_.u_matcher(), use_s, use_u);

  std::vector<num::Var> parts{user, context, prev, r.nlr.features};
  if (model_.config().api_dim > 0) parts.push_back(g_.constant(num::Tensor::vector(state_.api_features)));
  r.features = num::concat(parts);

  const auto next = num::lstm_step(r.features, h_, c_, g_.param(model_.ctx_w()), g_.param(model_.ctx_b()));
  h_ = next.h;
  c_ = next.c;
  const num::Var response = num::affine(g_.param(model_.proj_w()), h_, g_.param(model_.proj_b()));
  const num::Var tau = num::exp(g_.param(model_.log_tau()));
  const num::Var raw =
      model_.config().score == ScoreKind::Cosine ? num::cosine_rows(response, cands) : num::matvec(cands, response);
  r.scores = num::divide(raw, tau);
  r.probs = num::softmax(r.scores);

  const auto& p = r.probs.value().values();
  r.selected = input.candidates[select_action(p, input.candidates)];

  state_.h = h_.value();
  state_.c = c_.value();
  const ActionTemplate& acted = catalog[input.taken.value_or(r.selected)];
  state_.prev_action = acted.text;
  api_dispatch(acted, state_, model_.api(), model_.config().api_dim);
  ++state_.turns;
  return r;
}

std::vector<double> turn_forward(const Model& model, DialogState& state, const TurnInput& input) {
  num::Graph g;
  DialogPass pass(model, g, state);
  const auto& v = pass.turn(input).probs.value().values();
  return {v.begin(), v.end()};
}

}  // namespace teachbot::model

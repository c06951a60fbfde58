#include "teachbot/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "teachbot/encoder/word_vectors.hpp"
#include "teachbot/error.hpp"
#include "teachbot/numcore/adam.hpp"
#include "teachbot/numcore/functions.hpp"
#include "teachbot/train/evaluate.hpp"

namespace teachbot::train {

using json = nlohmann::ordered_json;

namespace {

const char* encoder_name(EncoderVariant e) { return e == EncoderVariant::SC ? "SC" : "WE"; }
const char* update_name(UpdateMode u) { return u == UpdateMode::Dialog ? "dialog" : "turn"; }

}  // namespace

std::string config_to_json(const TrainConfig& c) {
  json j{{"domain", c.domain},
         {"model", json::parse(model::config_to_json(c.model))},
         {"encoder", encoder_name(c.encoder)},
         {"lr", c.lr},
         {"clip_norm", c.clip_norm},
         {"max_epochs", c.max_epochs},
         {"patience", c.patience},
         {"seed", c.seed},
         {"rules", c.rules_path},
         {"word_vectors", c.word_vectors_path},
         {"train_size", c.train_size ? json(*c.train_size) : json(nullptr)},
         {"update", update_name(c.update)},
         {"resample_per_epoch", c.resample_per_epoch}};
  return j.dump(2) + "\n";
}

TrainConfig config_from_json(const std::string& text) {
  TrainConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("train config: expected a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "domain") {
        c.domain = v.get<std::string>();
      } else if (key == "model") {
        c.model = model::config_from_json(v.dump());
      } else if (key == "encoder") {
        const auto e = v.get<std::string>();
        if (e == "SC") c.encoder = EncoderVariant::SC;
        else if (e == "WE") c.encoder = EncoderVariant::WE;
        else throw ConfigError("train config: encoder must be SC or WE, got '" + e + "'");
      } else if (key == "lr") {
        c.lr = v.get<double>();
      } else if (key == "clip_norm") {
        c.clip_norm = v.get<double>();
      } else if (key == "max_epochs") {
        c.max_epochs = v.get<std::size_t>();
      } else if (key == "patience") {
        c.patience = v.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "rules") {
        c.rules_path = v.get<std::string>();
      } else if (key == "word_vectors") {
        c.word_vectors_path = v.get<std::string>();
      } else if (key == "train_size") {
        if (v.is_null()) c.train_size.reset();
        else c.train_size = v.get<std::size_t>();
      } else if (key == "update") {
        const auto u = v.get<std::string>();
        if (u == "dialog") c.update = UpdateMode::Dialog;
        else if (u == "turn") c.update = UpdateMode::Turn;
        else throw ConfigError("train config: update must be dialog or turn, got '" + u + "'");
      } else if (key == "resample_per_epoch") {
        c.resample_per_epoch = v.get<bool>();
      } else {
        throw ConfigError("train config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return c;
}

void validate(const TrainConfig& c, bool rules_given) {
  if (!(c.lr > 0) || !std::isfinite(c.lr)) throw ConfigError("lr must be positive");
  if (!(c.clip_norm > 0) || !std::isfinite(c.clip_norm)) throw ConfigError("clip_norm must be positive");
  if (c.max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  if (c.model.variant != model::Variant::NlrSU && !rules_given)
    throw ConfigError("variant " + model::variant_name(c.model.variant) + " needs a rule file");
  if (c.encoder == EncoderVariant::WE) {
    if (c.word_vectors_path.empty()) throw ConfigError("encoder WE needs a word-vector file");
    if (c.model.encoder != model::EncoderKind::BiLstm) throw ConfigError("encoder WE needs the recurrent sentence encoder");
  }
  if (c.train_size && *c.train_size == 0) throw ConfigError("train_size must be at least 1");
}

num::Var turn_loss(num::Var distribution, std::size_t gold_index) {
  if (gold_index >= distribution.size())
    throw ArgumentError("turn_loss: gold index " + std::to_string(gold_index) + " out of range for " +
                        std::to_string(distribution.size()) + " candidates");
  return num::nll(distribution, gold_index, 1e-12);
}

std::string metrics_jsonl(const TrainHistory& h) {
  std::string out;
  for (const auto& e : h.epochs) {
    json j{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_recall1", e.dev_recall1},
           {"best", e.epoch == h.best_epoch}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string timing_jsonl(const TrainHistory& h) {
  std::string out;
  for (const auto& e : h.epochs) out += json{{"epoch", e.epoch}, {"seconds", e.seconds}}.dump() + "\n";
  return out;
}

enc::Vocabulary build_vocabulary(const data::DomainDataset& ds, const nlr::RuleBook& rules) {
  enc::Vocabulary v;
  for (const auto& t : ds.catalog.actions.items()) v.add_text(t.text);
  for (const auto* split : {&ds.train, &ds.dev, &ds.test})
    for (const auto& d : *split)
      for (const auto& t : d.turns) v.add_text(t.user);
  for (const auto* set : {&rules.s_rules, &rules.u_rules})
    for (const auto& r : set->rules) {
      v.add_text(r.pre);
      v.add_text(r.post);
    }
  return v;
}

std::unique_ptr<model::Model> make_model(const TrainConfig& config, const data::DomainDataset& ds,
                                         const nlr::RuleBook& rules, num::Rng& rng) {
  enc::Vocabulary vocab = build_vocabulary(ds, rules);
  std::unique_ptr<model::Model> m;
  if (config.encoder == EncoderVariant::WE) {
    const auto table = enc::load_word_vectors(config.word_vectors_path, vocab, config.model.dims.word_dim, rng);
    m = std::make_unique<model::Model>(config.model, std::move(vocab), ds.slot_types, ds.catalog.actions, rng,
                                       &table.table);
  } else {
    m = std::make_unique<model::Model>(config.model, std::move(vocab), ds.slot_types, ds.catalog.actions, rng);
  }
  m->set_rules(rules);
  return m;
}

namespace {

std::vector<data::ProcessedDialog> in_domain(const std::vector<data::ProcessedDialog>& dialogs,
                                             const std::string& domain) {
  if (domain == "all") return dialogs;
  std::vector<data::ProcessedDialog> out;
  for (const auto& d : dialogs)
    if (d.domain == domain) out.push_back(d);
  return out;
}

std::string where(std::size_t epoch, const data::ProcessedDialog& d, std::size_t turn) {
  return "epoch " + std::to_string(epoch) + ", dialog " + d.id + ", turn " + std::to_string(turn);
}

class Trainer {
 public:
  Trainer(const TrainConfig& config, model::Model& m) : config_(config), model_(m), adam_({config.lr}) {}

  // Returns the summed loss and number of turns.
  std::pair<double, std::size_t> dialog(const data::ProcessedDialog& d, std::size_t epoch) {
    model::DialogState state = model_.initial_state();
    double total = 0;
    if (config_.update == UpdateMode::Dialog) {
      num::Graph g;
      model::DialogPass pass(model_, g, state);
      num::Var loss;
      for (std::size_t t = 0; t < d.turns.size(); ++t) {
        const num::Var l = turn_term(pass, d, t, epoch);
        loss = loss ? num::add(loss, l) : l;
      }
      if (!loss) return {0.0, 0};
      total = loss.scalar();
      update(g, loss, d, epoch);
    } else {
      // Each turn gets its own graph; the context state enters the next
      // turn as a constant, so no gradient crosses turn boundaries.
      for (std::size_t t = 0; t < d.turns.size(); ++t) {
        num::Graph g;
        model::DialogPass pass(model_, g, state);
        const num::Var l = turn_term(pass, d, t, epoch);
        total += l.scalar();
        update(g, l, d, epoch);
      }
    }
    return {total, d.turns.size()};
  }

 private:
  num::Var turn_term(model::DialogPass& pass, const data::ProcessedDialog& d, std::size_t t, std::size_t epoch) {
    const auto& turn = d.turns[t];
    try {
      const auto r = pass.turn(turn_input(turn, turn.candidates));
      const num::Var l = turn_loss(r.probs, turn.gold_index);
      if (!std::isfinite(l.scalar())) throw NumericError("loss is " + std::to_string(l.scalar()));
      return l;
    } catch (const NumericError& e) {
      throw NumericError("non-finite loss at " + where(epoch, d, t) + " (user: '" + turn.user + "', gold " +
                         std::to_string(turn.gold) + "): " + e.what());
    }
  }

  void update(num::Graph& g, num::Var loss, const data::ProcessedDialog& d, std::size_t epoch) {
    auto& params = model_.params();
    params.zero_grad();
    g.backward(loss);
    num::clip_global_norm(params, config_.clip_norm);
    try {
      adam_.step(params);
    } catch (const NumericError& e) {
      throw NumericError("non-finite gradient at epoch " + std::to_string(epoch) + ", dialog " + d.id + ": " +
                         e.what());
    }
  }

  const TrainConfig& config_;
  model::Model& model_;
  num::Adam adam_;
};

}  // namespace

FitResult fit(const TrainConfig& config, const data::DomainDataset& ds, const nlr::RuleBook& rules,
              const EpochCallback& on_epoch) {
  if (config.max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  std::vector<data::ProcessedDialog> train = in_domain(ds.train, config.domain);
  const std::vector<data::ProcessedDialog> dev = in_domain(ds.dev, config.domain);
  if (config.train_size) {
    if (*config.train_size > train.size())
      throw ArgumentError("train_size " + std::to_string(*config.train_size) + " exceeds the " +
                          std::to_string(train.size()) + " training dialogs");
    train.resize(*config.train_size);
  }
  if (train.empty()) throw ArgumentError("fit: no training dialogs");
  if (dev.empty()) throw ArgumentError("fit: no dev dialogs for early stopping");

  num::Rng rng(config.seed);
  FitResult result;
  result.model = make_model(config, ds, rules, rng);
  model::Model& m = *result.model;
  num::Rng order_rng = rng.split();
  num::Rng candidate_rng = rng.split();

  Trainer trainer(config, m);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best = -1.0;
  std::vector<num::Tensor> best_params;
  std::size_t since_best = 0;
  const std::size_t patience = std::max<std::size_t>(config.patience, 1);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (config.resample_per_epoch && epoch > 1) {
      for (auto& d : train)
        for (auto& t : d.turns) {
          const auto c = data::make_candidates(t.gold, m.catalog().size(), candidate_rng);
          t.candidates = c.ids;
          t.gold_index = c.gold_index;
        }
    }
    order_rng.shuffle(std::span<std::size_t>(order));
    double loss = 0;
    std::size_t turns = 0;
    for (std::size_t i : order) {
      const auto [l, n] = trainer.dialog(train[i], epoch);
      loss += l;
      turns += n;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = turns ? loss / static_cast<double>(turns) : 0.0;
    rec.dev_recall1 = evaluate(m, dev).overall.r1;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.epochs.push_back(rec);

    if (rec.dev_recall1 > best) {
      best = rec.dev_recall1;
      result.history.best_epoch = epoch;
      best_params = m.params().snapshot();
      since_best = 0;
    } else {
      ++since_best;
    }
    if (on_epoch) on_epoch(rec);
    if (since_best >= patience) break;
  }
  m.params().restore(best_params);
  return result;
}

}  // namespace teachbot::train

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "chat.hpp"
#include "teachbot/data/dataset.hpp"
#include "teachbot/data/fixture.hpp"
#include "teachbot/data/kvret.hpp"
#include "teachbot/encoder/sentence_encoder.hpp"
#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"
#include "teachbot/numcore/functions.hpp"
#include "teachbot/train/evaluate.hpp"
#include "teachbot/train/experiments.hpp"
#include "teachbot/train/trainer.hpp"

namespace teachbot::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Written to a temporary name and renamed, so a reader never sees half a file.
void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = enc::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  for (const auto& s : split_list(text)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v == 0) throw ConfigError("--sizes: '" + s + "' is not a positive integer");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.empty()) throw ConfigError("--sizes: expected a comma-separated list such as 100,300,800");
  return sizes;
}

void print_recall(std::ostream& out, const std::string& label, const train::Recall& r) {
  out << label << "recall@1 " << fixed(r.r1) << "  recall@2 " << fixed(r.r2) << "  recall@5 " << fixed(r.r5)
      << "  (" << r.turns << " turns)\n";
}

// ---- shared training flags -------------------------------------------------------------

struct TrainFlags {
  std::string data_dir;
  std::string config;
  std::string rules;
  std::string variant;
  std::string encoder;
  std::string update;
  std::string word_vectors;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t patience = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* patience_opt = nullptr;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool variant_flag = true) {
  cmd->add_option("--data-dir", f.data_dir, "Preprocessed dataset directory")->required();
  cmd->add_option("--config", f.config, "Training config (JSON)");
  cmd->add_option("--rules", f.rules, "Rule file (JSON)");
  if (variant_flag) cmd->add_option("--variant", f.variant, "NLR, NLR-S, NLR-U or NLR-SU");
  cmd->add_option("--encoder", f.encoder, "SC (from scratch) or WE (pretrained word vectors)");
  cmd->add_option("--word-vectors", f.word_vectors, "GloVe-style word-vector file for --encoder WE");
  cmd->add_option("--update", f.update, "dialog (default) or turn");
  f.seed_opt = cmd->add_option("--seed", f.seed, "Random seed");
  f.epochs_opt = cmd->add_option("--epochs", f.epochs, "Maximum epochs");
  f.patience_opt = cmd->add_option("--patience", f.patience, "Early-stopping patience");
}

struct TrainSetup {
  train::TrainConfig config;
  nlr::RuleBook rules;
  bool rules_given = false;
  data::DomainDataset dataset;
};

// Resolves the config (file, then flags), loads rules and data. Throws
// before anything is written.
TrainSetup prepare(const TrainFlags& f, bool need_rules) {
  TrainSetup s;
  if (!f.config.empty()) s.config = train::config_from_json(read_text(f.config));
  if (!f.rules.empty()) s.config.rules_path = f.rules;
  if (!f.variant.empty()) s.config.model.variant = model::parse_variant(f.variant);
  if (!f.encoder.empty()) {
    if (f.encoder == "SC") s.config.encoder = train::EncoderVariant::SC;
    else if (f.encoder == "WE") s.config.encoder = train::EncoderVariant::WE;
    else throw ConfigError("--encoder must be SC or WE");
  }
  if (!f.word_vectors.empty()) s.config.word_vectors_path = f.word_vectors;
  if (!f.update.empty()) {
    if (f.update == "dialog") s.config.update = train::UpdateMode::Dialog;
    else if (f.update == "turn") s.config.update = train::UpdateMode::Turn;
    else throw ConfigError("--update must be dialog or turn");
  }
  if (*f.seed_opt) s.config.seed = f.seed;
  if (*f.epochs_opt) s.config.max_epochs = f.epochs;
  if (*f.patience_opt) s.config.patience = f.patience;

  s.rules_given = !s.config.rules_path.empty();
  if (need_rules && !s.rules_given) throw ConfigError("this command needs --rules");
  train::validate(s.config, s.rules_given || need_rules);
  if (s.rules_given) s.rules = nlr::load_rules(s.config.rules_path);
  if (s.config.encoder == train::EncoderVariant::WE && !fs::exists(s.config.word_vectors_path))
    throw ConfigError("word-vector file not found: " + s.config.word_vectors_path);
  s.dataset = data::read_dataset(f.data_dir);
  return s;
}

nlr::RuleBook rules_for_model(const std::string& flag, const fs::path& model_dir, std::string* used_path = nullptr) {
  fs::path path = flag;
  if (path.empty() && fs::exists(model_dir / "rules.json")) path = model_dir / "rules.json";
  if (used_path) *used_path = path.string();
  return path.empty() ? nlr::RuleBook{} : nlr::load_rules(path);
}

void check_catalog(const model::Model& m, const data::TemplateCatalog& catalog) {
  if (m.catalog().fingerprint() != catalog.actions.fingerprint())
    throw ConfigError("the model's action catalog does not match the dataset catalog (" +
                      std::to_string(m.catalog().size()) + " vs " + std::to_string(catalog.actions.size()) +
                      " templates); retrain or point at the matching data");
}

// ---- commands ------------------------------------------------------------------------------

struct PreprocessFlags {
  std::string data_dir;
  std::string out_dir;
  std::string domain = "all";
  std::uint64_t seed = 0;
  bool fixture = false;
};

int cmd_preprocess(const PreprocessFlags& f, std::ostream& out) {
  if (f.domain != "all" && f.domain != "weather" && f.domain != "navigate" && f.domain != "schedule")
    throw ConfigError("--domain must be weather, navigate, schedule or all");
  data::RawCorpus raw;
  data::BuildOptions options{f.domain, false};
  if (f.fixture) {
    num::Rng rng(f.seed);
    raw = data::make_fixture(rng);
    options.small_catalog_fallback = true;
  } else {
    if (f.data_dir.empty()) throw ConfigError("preprocess needs --data-dir (or TEACHBOT_DATA) or --fixture");
    raw = data::load_kvret_dir(f.data_dir);
  }
  const auto ds = data::build_dataset(raw, f.seed, options);
  data::write_dataset(f.out_dir, ds);
  if (f.fixture) write_text(fs::path(f.out_dir) / "rules.json", nlr::rules_to_json(data::fixture_rules()));

  const auto stats = data::dataset_stats(ds);
  out << "domain: " << ds.domain << "\n"
      << "train dialogs: " << ds.train.size() << "\n"
      << "dev dialogs: " << ds.dev.size() << "\n"
      << "test dialogs: " << ds.test.size() << "\n"
      << "turns: " << stats.turns << "\n"
      << "templates: " << stats.templates << "\n"
      << "avg turns per dialog: " << fixed(stats.avg_turns_per_dialog, 2) << "\n"
      << "avg user tokens: " << fixed(stats.avg_user_tokens, 2) << "\n"
      << "avg system tokens: " << fixed(stats.avg_system_tokens, 2) << "\n"
      << "wrote " << f.out_dir << "\n";
  return kOk;
}

int cmd_train(const TrainFlags& f, const std::string& out_dir, std::ostream& out) {
  TrainSetup s = prepare(f, false);
  out << "training " << model::variant_name(s.config.model.variant) << " on " << s.dataset.train.size()
      << " dialogs (seed " << s.config.seed << ")\n";
  auto result = train::fit(s.config, s.dataset, s.rules, [&](const train::EpochRecord& e) {
    out << "epoch " << e.epoch << "  loss " << fixed(e.train_loss) << "  dev recall@1 " << fixed(e.dev_recall1)
        << "\n";
  });
  const fs::path dir = out_dir;
  const fs::path model_dir = dir / "model";
  result.model->save(model_dir);
  if (s.rules_given) write_text(model_dir / "rules.json", nlr::rules_to_json(s.rules));
  write_text(dir / "config.json", train::config_to_json(s.config));
  write_text(dir / "metrics.jsonl", train::metrics_jsonl(result.history));
  write_text(dir / "timing.jsonl", train::timing_jsonl(result.history));

  const auto dev = train::evaluate(*result.model, s.dataset.dev);
  const auto test = train::evaluate(*result.model, s.dataset.test);
  json report{{"variant", model::variant_name(s.config.model.variant)},
              {"seed", s.config.seed},
              {"best_epoch", result.history.best_epoch},
              {"epochs", result.history.epochs.size()},
              {"dev", json::parse(train::report_to_json(dev))},
              {"test", json::parse(train::report_to_json(test))}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  out << "best epoch " << result.history.best_epoch << "\n";
  print_recall(out, "dev  ", dev.overall);
  print_recall(out, "test ", test.overall);
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

struct EvalFlags {
  std::string data_dir;
  std::string model_dir;
  std::string rules;
  std::string scorer = "model";
  std::string split = "test";
  std::string out_dir;
  std::uint64_t seed = 0;
  bool full_catalog = false;
};

int cmd_eval(const EvalFlags& f, std::ostream& out) {
  if (f.scorer != "model" && f.scorer != "oracle" && f.scorer != "random")
    throw ConfigError("--scorer must be model, oracle or random");
  if (f.split != "train" && f.split != "dev" && f.split != "test") throw ConfigError("--split must be train, dev or test");
  if (f.scorer == "model" && f.model_dir.empty()) throw ConfigError("--scorer model needs --model");
  const auto ds = data::read_dataset(f.data_dir);
  const auto& dialogs = ds.split(f.split);
  const train::EvalOptions options{f.full_catalog};
  train::EvalReport report;
  if (f.scorer == "model") {
    auto m = model::Model::load(f.model_dir);
    check_catalog(*m, ds.catalog);
    m->set_rules(rules_for_model(f.rules, f.model_dir));
    report = train::evaluate(*m, dialogs, options);
  } else if (f.scorer == "oracle") {
    train::OracleScorer oracle;
    report = train::evaluate(oracle, dialogs, ds.catalog.actions.size(), options);
  } else {
    train::RandomScorer random(f.seed);
    report = train::evaluate(random, dialogs, ds.catalog.actions.size(), options);
  }
  print_recall(out, f.split + " ", report.overall);
  for (const auto& [domain, r] : report.per_domain) print_recall(out, "  " + domain + ": ", r);
  if (!f.out_dir.empty()) {
    write_text(fs::path(f.out_dir) / ("eval_" + f.split + ".json"), train::report_to_json(report));
    out << "wrote " << f.out_dir << "\n";
  }
  return kOk;
}

int cmd_ablate(const TrainFlags& f, const std::string& out_dir, std::size_t seeds, std::ostream& out) {
  if (seeds == 0) throw ConfigError("--num-seeds must be at least 1");
  TrainSetup s = prepare(f, true);
  const auto rows = train::ablate(s.config, s.dataset, s.rules, seeds);
  const auto table = train::ablation_table(rows);
  write_text(fs::path(out_dir) / "ablation.json", train::ablation_json(rows));
  write_text(fs::path(out_dir) / "ablation.txt", table);
  out << table << "wrote " << out_dir << "\n";
  return kOk;
}

int cmd_curve(const TrainFlags& f, const std::string& out_dir, const std::string& sizes_text,
              const std::string& variants_text, std::size_t seeds, std::ostream& out) {
  if (seeds == 0) throw ConfigError("--num-seeds must be at least 1");
  const auto sizes = parse_sizes(sizes_text);
  std::vector<model::Variant> variants;
  for (const auto& v : split_list(variants_text)) variants.push_back(model::parse_variant(v));
  if (variants.empty()) throw ConfigError("--variants is empty");
  const bool need_rules = std::any_of(variants.begin(), variants.end(), [](auto v) { return v != model::Variant::NlrSU; });
  TrainSetup s = prepare(f, need_rules);
  for (std::size_t size : sizes)
    if (size > s.dataset.train.size())
      throw ArgumentError("curve size " + std::to_string(size) + " exceeds the " +
                          std::to_string(s.dataset.train.size()) + " training dialogs");
  const auto points = train::learning_curve(s.config, s.dataset, s.rules, sizes, seeds, variants);
  std::string summary = "size,variant,mean,std\n";
  for (const auto& c : train::summarize(points)) {
    summary += std::to_string(c.size) + "," + model::variant_name(c.variant) + "," + fixed(c.mean, 6) + "," +
               fixed(c.std, 6) + "\n";
    out << "size " << c.size << "  " << model::variant_name(c.variant) << "  recall@1 " << fixed(c.mean) << " +- "
        << fixed(c.std) << "\n";
  }
  write_text(fs::path(out_dir) / "curve.csv", train::curve_csv(points));
  write_text(fs::path(out_dir) / "curve_summary.csv", summary);
  out << "wrote " << out_dir << "\n";
  return kOk;
}

struct RulesCheckFlags {
  std::string rules;
  std::string catalog;
  std::string data_dir;
  std::string model_dir;
  double threshold = 0.5;
};

int cmd_rules_check(const RulesCheckFlags& f, std::ostream& out, std::ostream& err) {
  nlr::RuleBook book;
  try {
    book = nlr::load_rules(f.rules);
  } catch (const ValidationError& e) {
    err << "rule file " << f.rules << " is invalid:\n" << e.what() << "\n";
    return kValidationError;
  }
  fs::path catalog_path = f.catalog;
  if (catalog_path.empty() && !f.data_dir.empty()) catalog_path = fs::path(f.data_dir) / "catalog.json";
  if (catalog_path.empty()) throw ConfigError("rules-check needs --catalog or --data-dir");
  const auto catalog = data::read_catalog(catalog_path);
  const auto texts = catalog.actions.texts();

  std::unique_ptr<model::Model> m;
  std::shared_ptr<const enc::SentenceEncoder> stub;
  const enc::SentenceEncoder* encoder = nullptr;
  if (!f.model_dir.empty()) {
    m = model::Model::load(f.model_dir);
    encoder = &m->encoder();
  } else {
    // Wide enough that distinct texts rarely share an axis.
    stub = std::make_shared<enc::StubEncoder>(1 << 16);
    encoder = stub.get();
  }
  const num::Tensor rows = enc::encode_catalog(*encoder, texts);
  const std::size_t d = encoder->dim();

  std::size_t warnings = 0;
  for (const auto* set : {&book.s_rules, &book.u_rules}) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      const num::Tensor post = encoder->embed(set->rules[i].post);
      double best = -2;
      std::size_t best_id = 0;
      for (std::size_t k = 0; k < texts.size(); ++k) {
        const double c = num::cosine(post.values(), rows.values().subspan(k * d, d));
        if (c > best) {
          best = c;
          best_id = k;
        }
      }
      if (best < f.threshold) {
        ++warnings;
        out << "warning: " << nlr::kind_name(set->kind) << "_rules[" << i << "]: post-condition \""
            << set->rules[i].post << "\" best catalog cosine " << fixed(best) << " (\"" << texts[best_id]
            << "\") is below " << fixed(f.threshold, 2) << "\n";
      }
    }
  }
  out << (book.s_rules.size() + book.u_rules.size()) << " rules validated (" << book.s_rules.size() << " s-rules, "
      << book.u_rules.size() << " u-rules), " << warnings << " warning" << (warnings == 1 ? "" : "s") << "\n";
  return kOk;
}

struct ChatFlags {
  std::string model_dir;
  std::string rules;
  std::string data_dir;
  std::string catalog;
  std::string transcript;
  bool debug = false;
};

int cmd_chat(const ChatFlags& f, std::istream& in, std::ostream& out) {
  auto m = model::Model::load(f.model_dir);
  std::string rules_path;
  m->set_rules(rules_for_model(f.rules, f.model_dir, &rules_path));
  model::Lexicon lexicon;
  if (!f.data_dir.empty()) {
    const auto ds = data::read_dataset(f.data_dir);
    check_catalog(*m, ds.catalog);
    lexicon = ds.lexicon;
  }
  if (!f.catalog.empty()) check_catalog(*m, data::read_catalog(f.catalog));

  ChatSession session(*m, rules_path, std::move(lexicon), f.debug, out);
  out << "teachbot chat: " << m->catalog().size() << " templates, " << m->rules().s_rules.size() << " s-rules, "
      << m->rules().u_rules.size() << " u-rules. Commands: /reset, /rules, /quit\n";
  std::string line;
  while (std::getline(in, line))
    if (!session.handle(line)) break;
  if (!f.transcript.empty()) {
    std::string text;
    for (const auto& t : session.transcript()) text += t + "\n";
    write_text(f.transcript, text);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"teachbot: dialog response ranking with natural-language rules"};
  app.require_subcommand(1);

  PreprocessFlags pre;
  auto* c_pre = app.add_subcommand("preprocess", "Delexicalize raw dialogs and write dataset files");
  c_pre->add_option("--data-dir", pre.data_dir, "Directory with the raw kvret_*_public.json files")
      ->envname("TEACHBOT_DATA");
  c_pre->add_option("--out-dir", pre.out_dir, "Output directory")->required();
  c_pre->add_option("--domain", pre.domain, "weather, navigate, schedule or all");
  c_pre->add_option("--seed", pre.seed, "Candidate-sampling seed");
  c_pre->add_flag("--fixture", pre.fixture, "Generate the synthetic weather fixture instead of reading data");

  TrainFlags tr;
  std::string tr_out;
  auto* c_train = app.add_subcommand("train", "Train a model");
  add_train_flags(c_train, tr);
  c_train->add_option("--out-dir", tr_out, "Output directory")->required();

  EvalFlags ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate recall@k on a split");
  c_eval->add_option("--data-dir", ev.data_dir, "Preprocessed dataset directory")->required();
  c_eval->add_option("--model", ev.model_dir, "Model directory written by train (its model/ folder)");
  c_eval->add_option("--rules", ev.rules, "Rule file (defaults to the one saved with the model)");
  c_eval->add_option("--scorer", ev.scorer, "model, oracle or random");
  c_eval->add_option("--split", ev.split, "train, dev or test");
  c_eval->add_option("--seed", ev.seed, "Seed for the random scorer");
  c_eval->add_option("--out-dir", ev.out_dir, "Write eval_<split>.json here");
  c_eval->add_flag("--full-catalog", ev.full_catalog, "Rank every template instead of the sampled candidates");

  TrainFlags ab;
  std::string ab_out;
  std::size_t ab_seeds = 3;
  auto* c_ablate = app.add_subcommand("ablate", "Train NLR, NLR-S, NLR-U and NLR-SU and compare");
  add_train_flags(c_ablate, ab, false);
  c_ablate->add_option("--out-dir", ab_out, "Output directory")->required();
  c_ablate->add_option("--num-seeds", ab_seeds, "Seeds per variant");

  TrainFlags cu;
  std::string cu_out, cu_sizes, cu_variants = "NLR,NLR-S,NLR-U,NLR-SU";
  std::size_t cu_seeds = 3;
  auto* c_curve = app.add_subcommand("curve", "Test recall@1 against training-set size");
  add_train_flags(c_curve, cu, false);
  c_curve->add_option("--out-dir", cu_out, "Output directory")->required();
  c_curve->add_option("--sizes", cu_sizes, "Comma-separated training sizes, e.g. 100,300,800")->required();
  c_curve->add_option("--variants", cu_variants, "Comma-separated variants");
  c_curve->add_option("--num-seeds", cu_seeds, "Seeds per point");

  RulesCheckFlags rc;
  auto* c_rules = app.add_subcommand("rules-check", "Validate a rule file against a catalog");
  c_rules->add_option("--rules", rc.rules, "Rule file (JSON)")->required();
  c_rules->add_option("--catalog", rc.catalog, "catalog.json");
  c_rules->add_option("--data-dir", rc.data_dir, "Preprocessed dataset directory (uses its catalog.json)");
  c_rules->add_option("--model", rc.model_dir, "Score with this model's encoder instead of the stub encoder");
  c_rules->add_option("--threshold", rc.threshold, "Warn below this best cosine");

  ChatFlags ch;
  auto* c_chat = app.add_subcommand("chat", "Talk to a trained model");
  c_chat->add_option("--model", ch.model_dir, "Model directory")->required();
  c_chat->add_option("--rules", ch.rules, "Rule file, reloadable with /rules");
  c_chat->add_option("--data-dir", ch.data_dir, "Dataset directory for the entity lexicon and catalog check");
  c_chat->add_option("--catalog", ch.catalog, "catalog.json to check the model against");
  c_chat->add_option("--transcript", ch.transcript, "Write the transcript here on exit");
  c_chat->add_flag("--debug", ch.debug, "Show the top-5 distribution, firing rules and alpha mass");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (*c_pre) return cmd_preprocess(pre, out);
    if (*c_train) return cmd_train(tr, tr_out, out);
    if (*c_eval) return cmd_eval(ev, out);
    if (*c_ablate) return cmd_ablate(ab, ab_out, ab_seeds, out);
    if (*c_curve) return cmd_curve(cu, cu_out, cu_sizes, cu_variants, cu_seeds, out);
    if (*c_rules) return cmd_rules_check(rc, out, err);
    if (*c_chat) return cmd_chat(ch, in, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace teachbot::cli

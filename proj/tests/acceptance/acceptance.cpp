// Acceptance gate. Prints one PASS / FAIL / SKIP line per criterion and
// exits non-zero if anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support/fixture_data.hpp"
#include "support/gradcheck.hpp"
#include "support/nlr_oracle.hpp"
#include "support/temp_dir.hpp"
#include "support/tiny_model.hpp"
#include "teachbot/data/kvret.hpp"
#include "teachbot/encoder/sentence_encoder.hpp"
#include "teachbot/error.hpp"
#include "teachbot/nlr/inferencer.hpp"
#include "teachbot/train/evaluate.hpp"
#include "teachbot/train/experiments.hpp"

namespace teachbot {
namespace {

using num::Graph;
using num::Tensor;
using num::Var;
using Clock = std::chrono::steady_clock;

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Tensor random_matrix(std::size_t r, std::size_t c, num::Rng& rng) {
  Tensor t(num::Shape{r, c});
  num::fill_uniform(t, -1, 1, rng);
  return t;
}

Tensor random_vector(std::size_t n, num::Rng& rng, double scale = 1.0) {
  Tensor t = Tensor::zeros(n);
  num::fill_uniform(t, -scale, scale, rng);
  return t;
}

// ---- 1: gradients --------------------------------------------------------------------

struct GradSuite {
  std::string name;
  std::function<testing::GradCheckResult(std::uint64_t)> instance;
};

testing::GradCheckResult grad_lstm(std::uint64_t seed) {
  num::Rng rng(1000 + seed);
  const std::size_t in = 3, hid = 4;
  num::ParameterSet ps;
  auto& w = ps.add("w", num::xavier_uniform(in + hid, 4 * hid, rng));
  auto& b = ps.add("b", random_vector(4 * hid, rng, 0.5));
  auto& x = ps.add("x", random_vector(in, rng));
  auto& h0 = ps.add("h0", random_vector(hid, rng));
  auto& c0 = ps.add("c0", random_vector(hid, rng));
  const Tensor ph = random_vector(hid, rng), pc = random_vector(hid, rng);
  auto loss = [&](Graph& g) {
    auto s1 = num::lstm_step(g.param(x), g.param(h0), g.param(c0), g.param(w), g.param(b));
    auto s2 = num::lstm_step(g.param(x), s1.h, s1.c, g.param(w), g.param(b));
    return num::add(num::dot(s2.h, g.constant(ph)), num::dot(s2.c, g.constant(pc)));
  };
  return testing::check_gradients(ps, loss, rng, 64);
}

testing::GradCheckResult grad_encoder(std::uint64_t seed) {
  num::Rng rng(2000 + seed);
  enc::Vocabulary vocab;
  vocab.add_text("where is the nearest <poi_type> ? it is raining today");
  num::ParameterSet ps;
  auto bind = enc::BiLstmEncoder::create(ps, vocab.size(), {5, 4}, rng);
  for (auto* b : {bind.fwd_b, bind.bwd_b}) num::fill_uniform(b->value, -0.3, 0.3, rng);
  enc::BiLstmEncoder e(vocab, bind);
  const Tensor probe = random_vector(e.dim(), rng);
  auto loss = [&](Graph& g) {
    auto a = e.encode_text(g, "where is the nearest <poi_type> ?");
    auto b = e.encode_text(g, "it is raining today");
    return num::add(num::dot(a, g.constant(probe)), num::cosine(a, b));
  };
  return testing::check_gradients(ps, loss, rng, 40);
}

testing::GradCheckResult grad_nlr(std::uint64_t seed) {
  num::Rng rng(3000 + seed);
  num::ParameterSet ps;
  auto s = nlr::MatcherParams::create(ps, nlr::RuleKind::System, rng.uniform(0.2, 1.0));
  auto u = nlr::MatcherParams::create(ps, nlr::RuleKind::User, rng.uniform(0.2, 1.0));
  for (auto* p : {s.pre_bias, s.post_bias, u.pre_bias, u.post_bias}) p->value[0] = rng.uniform(-1, 1);
  const std::size_t d = 5, R = 3, K = 4;
  auto& prev = ps.add("prev", random_matrix(1, d, rng));
  auto& user = ps.add("user", random_matrix(1, d, rng));
  auto& s_pre = ps.add("s_pre", random_matrix(R, d, rng));
  auto& s_post = ps.add("s_post", random_matrix(R, d, rng));
  auto& u_pre = ps.add("u_pre", random_matrix(2, d, rng));
  auto& u_post = ps.add("u_post", random_matrix(2, d, rng));
  auto& cands = ps.add("cands", random_matrix(K, d, rng));
  const Tensor probe = random_vector(2 * d, rng);
  auto loss = [&](Graph& g) {
    const nlr::RuleMemory sm{R, g.param(s_pre), g.param(s_post)};
    const nlr::RuleMemory um{2, g.param(u_pre), g.param(u_post)};
    const nlr::NlrInputs in{num::row(g.param(prev), 0), num::row(g.param(user), 0), g.param(cands)};
    return num::dot(nlr::nlr_features(g, in, sm, um, s, u).features, g.constant(probe));
  };
  return testing::check_gradients(ps, loss, rng, 40);
}

testing::GradCheckResult grad_projection(std::uint64_t seed) {
  num::Rng rng(4000 + seed);
  const std::size_t hc = 6, d = 5, K = 4;
  num::ParameterSet ps;
  auto& w = ps.add("proj.w", random_matrix(d, hc, rng));
  auto& b = ps.add("proj.b", random_vector(d, rng, 0.5));
  auto& h = ps.add("h", random_vector(hc, rng));
  auto& cands = ps.add("cands", random_matrix(K, d, rng));
  auto& log_tau = ps.add("log_tau", Tensor::scalar(std::log(rng.uniform(0.3, 1.5))));
  const std::size_t gold = rng.below(K);
  auto loss = [&](Graph& g) {
    const Var r = num::affine(g.param(w), g.param(h), g.param(b));
    const Var logits = num::divide(num::cosine_rows(r, g.param(cands)), num::exp(g.param(log_tau)));
    return num::nll(num::softmax(logits), gold);
  };
  return testing::check_gradients(ps, loss, rng, 40);
}

testing::GradCheckResult grad_turn_loss(std::uint64_t seed) {
  auto m = testing::make_tiny_model(5000 + seed);
  m->set_rules(testing::tiny_rules());
  num::Rng rng(seed);
  for (auto* p : {&m->s_matcher(), &m->u_matcher()}) {
    p->pre_bias->value[0] = rng.uniform(-1, 1);
    p->post_bias->value[0] = rng.uniform(-1, 1);
    p->log_lambda->value[0] = std::log(rng.uniform(0.3, 1.5));
  }
  num::fill_uniform(m->ctx_b().value, -0.5, 0.5, rng);
  num::fill_uniform(m->proj_b().value, -0.5, 0.5, rng);
  m->log_tau().value[0] = std::log(rng.uniform(0.3, 1.5));
  const auto dialog = testing::tiny_dialog();
  auto loss = [&](Graph& g) {
    auto state = m->initial_state();
    model::DialogPass pass(*m, g, state);
    Var total = g.constant(Tensor::scalar(0.0));
    for (const auto& turn : dialog) {
      const auto r = pass.turn(turn);
      const auto gold = std::find(turn.candidates.begin(), turn.candidates.end(), *turn.taken) - turn.candidates.begin();
      total = num::add(total, train::turn_loss(r.probs, static_cast<std::size_t>(gold)));
    }
    return total;
  };
  return testing::check_gradients(m->params(), loss, rng, 30);
}

Verdict criterion_gradients() {
  const auto t0 = Clock::now();
  const std::vector<GradSuite> suites{{"lstm", grad_lstm},
                                      {"encoder", grad_encoder},
                                      {"nlr", grad_nlr},
                                      {"projection", grad_projection},
                                      {"turn-loss", grad_turn_loss}};
  double worst = 0;
  std::string where;
  std::size_t instances = 0;
  for (const auto& s : suites) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto r = s.instance(seed);
      ++instances;
      if (r.worst >= worst) {
        worst = r.worst;
        where = s.name + " seed " + std::to_string(seed) + " " + r.worst_name;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-4 && secs < 120;
  return {ok ? Outcome::Pass : Outcome::Fail, std::to_string(instances) + " instances over 5 suites, worst rel err " +
                                                  fmt("%.2e", worst) + " (" + where + "), " + fmt("%.1f", secs) +
                                                  " s"};
}

// ---- 2: NLR oracle ---------------------------------------------------------------------

Verdict criterion_oracle() {
  const std::size_t d = 6;
  double worst = 0;
  std::size_t runs = 0;
  for (std::size_t R = 0; R <= 5; ++R) {
    for (std::size_t K = 1; K <= 5; ++K) {
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        num::Rng rng(seed * 7919 + R * 31 + K);
        num::ParameterSet ps;
        auto m = nlr::MatcherParams::create(ps, nlr::RuleKind::User, rng.uniform(0.05, 2.0));
        m.pre_bias->value[0] = rng.uniform(-2, 2);
        m.post_bias->value[0] = rng.uniform(-2, 2);
        const Tensor q = random_matrix(1, d, rng);
        const Tensor pre = random_matrix(std::max<std::size_t>(R, 1), d, rng);
        const Tensor post = random_matrix(std::max<std::size_t>(R, 1), d, rng);
        const Tensor cands = random_matrix(K, d, rng);
        Graph g;
        nlr::RuleMemory mem;
        mem.rules = R;
        if (R > 0) {
          mem.pre = g.constant(pre);
          mem.post = g.constant(post);
        }
        const auto r = nlr::infer(num::row(g.constant(q), 0), mem, g.constant(cands), m);
        nlr::check_normalization(r);
        const std::vector<std::vector<double>> none;
        const auto o = testing::oracle_infer(testing::rows_of(q)[0], R ? testing::rows_of(pre) : none,
                                             R ? testing::rows_of(post) : none, testing::rows_of(cands), m.lambda(),
                                             {m.pre_bias->value[0]}, {m.post_bias->value[0]});
        auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
        for (std::size_t i = 0; i < o.mu.size(); ++i) track(r.mu.value()[i], o.mu[i]);
        if (R > 0)
          for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < o.nu[i].size(); ++j) track(r.nu->value().at(i, j), o.nu[i][j]);
        for (std::size_t j = 0; j < K; ++j) track(r.combined.alpha.value()[j], o.alpha[j]);
        track(r.combined.zero_mass.scalar(), o.zero_mass);
        for (std::size_t x = 0; x < d; ++x) track(r.embedding.value()[x], o.embedding[x]);
        ++runs;
      }
    }
  }
  // Every inference pass re-checks normalization internally; a training run
  // over the fixture exercises it on real model turns.
  const auto ds = testing::fixture_dataset(3);
  auto config = testing::small_train_config(2);
  config.rules_path = "fixture";
  train::fit(config, ds, data::fixture_rules());
  const bool ok = worst <= 1e-10;
  return {ok ? Outcome::Pass : Outcome::Fail, std::to_string(runs) + " (R,K,seed) cases, max |diff| " +
                                                  fmt("%.2e", worst) +
                                                  "; normalization held on every pass incl. a fixture training run"};
}

// ---- 3: closed-form matcher --------------------------------------------------------------

Verdict criterion_closed_form() {
  double worst = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    // One exact match, n - 1 orthogonal rules, and the zero-bias no-match
    // slot: n non-matching logits of e^0 each.
    enc::StubEncoder stub(32);
    nlr::RuleSet set;
    set.kind = nlr::RuleKind::User;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string pre = "pre " + std::to_string(i);
      stub.pin(pre, i);
      stub.pin("post " + std::to_string(i), 16 + i);
      set.rules.push_back({pre, "post " + std::to_string(i)});
    }
    num::ParameterSet ps;
    const auto matcher = nlr::MatcherParams::create(ps, nlr::RuleKind::User, 0.1);
    Graph g;
    const auto memory = nlr::build_rule_memory(g, set, stub);
    const Var mu = nlr::rule_relevance(stub.encode_text(g, "pre 0"), memory, matcher);
    const double e10 = std::exp(10.0);
    const double expected = e10 / (e10 + static_cast<double>(n));
    worst = std::max(worst, std::abs(mu.value()[0] - expected));
  }
  return {worst <= 1e-9 ? Outcome::Pass : Outcome::Fail,
          "mu(exact) vs e^10/(e^10+N) for N=1..10, max |diff| " + fmt("%.2e", worst)};
}

// ---- 4: real-data statistics -------------------------------------------------------------

struct ReferenceStats {
  std::string domain;
  std::size_t train, dev, test, templates;
  double avg_turns;
};

const std::vector<ReferenceStats>& reference_stats() {
  static const std::vector<ReferenceStats> s{{"weather", 797, 99, 100, 187, 5.40},
                                         {"navigate", 800, 100, 100, 259, 6.56},
                                         {"schedule", 828, 103, 104, 158, 7.32}};
  return s;
}

Verdict criterion_data() {
  const char* dir = std::getenv("TEACHBOT_DATA");
  if (!dir || !*dir) return {Outcome::Skip, "TEACHBOT_DATA not set; the in-car assistant corpus is not available"};
  const auto raw = data::load_kvret_dir(dir);
  bool ok = true;
  std::ostringstream detail;
  for (const auto& p : reference_stats()) {
    const auto ds = data::build_dataset(raw, 0, {p.domain, false});
    const auto stats = data::dataset_stats(ds);
    const double tol = 0.05 * static_cast<double>(p.templates);
    const bool sizes = ds.train.size() == p.train && ds.dev.size() == p.dev && ds.test.size() == p.test;
    const bool templates = std::abs(static_cast<double>(stats.templates) - static_cast<double>(p.templates)) <= tol;
    const bool turns = std::abs(stats.avg_turns_per_dialog - p.avg_turns) <= 0.5;
    ok = ok && sizes && templates && turns;
    detail << p.domain << " " << ds.train.size() << "/" << ds.dev.size() << "/" << ds.test.size() << " templates "
           << stats.templates << " avg turns " << fmt("%.2f", stats.avg_turns_per_dialog) << "; ";
  }
  return {ok ? Outcome::Pass : Outcome::Fail, detail.str()};
}

// ---- 5: overfit ------------------------------------------------------------------------------

Verdict criterion_overfit() {
  const auto t0 = Clock::now();
  auto ds = testing::fixture_dataset(3);
  for (auto* split : {&ds.dev, &ds.test}) ds.train.insert(ds.train.end(), split->begin(), split->end());
  ds.dev = ds.train;
  ds.test = ds.train;
  train::TrainConfig config;
  config.max_epochs = 200;
  config.patience = 25;
  config.rules_path = "fixture";
  const auto fit = train::fit(config, ds, data::fixture_rules());
  std::size_t first = 0;
  for (const auto& e : fit.history.epochs)
    if (!first && e.dev_recall1 >= 0.95) first = e.epoch;
  const double recall = train::evaluate(*fit.model, ds.train).overall.r1;
  const double secs = seconds_since(t0);
  const bool ok = recall >= 0.95 && first > 0 && first <= 200 && secs < 300;
  return {ok ? Outcome::Pass : Outcome::Fail,
          std::to_string(ds.train.size()) + " dialogs, train recall@1 " + fmt("%.4f", recall) + ", first >= 0.95 at epoch " +
              std::to_string(first) + ", " + std::to_string(fit.history.epochs.size()) + " epochs in " +
              fmt("%.1f", secs) + " s"};
}

// ---- 6: fixture ablation ------------------------------------------------------------------

Verdict criterion_ablation() {
  const auto ds = testing::fixture_dataset(3);
  train::TrainConfig config;
  config.patience = 20;
  config.rules_path = "fixture";
  const auto rows = train::ablate(config, ds, data::fixture_rules(), 3);
  const auto& nlr = rows.front();
  const auto& su = rows.back();
  bool ok = nlr.variant == model::Variant::Nlr && su.variant == model::Variant::NlrSU;
  std::ostringstream detail;
  for (std::size_t s = 0; s < nlr.recall1.size(); ++s) {
    ok = ok && nlr.recall1[s] > su.recall1[s];
    detail << "seed " << s << ": NLR " << fmt("%.3f", nlr.recall1[s]) << " vs NLR-SU " << fmt("%.3f", su.recall1[s])
           << "; ";
  }
  return {ok ? Outcome::Pass : Outcome::Fail, detail.str()};
}

// ---- 7: desk-scale replication ---------------------------------------------------------------

Verdict criterion_replication() {
  const char* dir = std::getenv("TEACHBOT_DATA");
  const char* rules_dir = std::getenv("TEACHBOT_RULES");
  const char* extended = std::getenv("TEACHBOT_EXTENDED");
  if (!dir || !*dir || !rules_dir || !*rules_dir || !extended || std::string(extended) != "1")
    return {Outcome::Skip,
            "needs TEACHBOT_DATA, TEACHBOT_RULES (<domain>.json per domain) and TEACHBOT_EXTENDED=1; hours of CPU"};
  const std::map<std::string, double> target{{"weather", 42.07}, {"navigate", 35.19}, {"schedule", 38.31}};
  const auto raw = data::load_kvret_dir(dir);
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [domain, reference] : target) {
    const auto ds = data::build_dataset(raw, 0, {domain, false});
    const std::string rules_path = std::string(rules_dir) + "/" + domain + ".json";
    const auto rules = nlr::load_rules(rules_path);
    train::TrainConfig config;
    config.rules_path = rules_path;
    double nlr_mean = 0, su_mean = 0;
    for (auto variant : {model::Variant::Nlr, model::Variant::NlrSU}) {
      double total = 0;
      for (std::uint64_t s = 0; s < 3; ++s) {
        auto c = config;
        c.seed = s;
        c.model.variant = variant;
        total += train::evaluate(*train::fit(c, ds, rules).model, ds.test).overall.r1;
      }
      (variant == model::Variant::Nlr ? nlr_mean : su_mean) = total / 3;
    }
    ok = ok && std::abs(100 * nlr_mean - reference) <= 10 && nlr_mean > su_mean;
    detail << domain << " NLR " << fmt("%.2f", 100 * nlr_mean) << " (target " << fmt("%.2f", reference) << ") NLR-SU "
           << fmt("%.2f", 100 * su_mean) << "; ";
  }
  return {ok ? Outcome::Pass : Outcome::Fail, detail.str()};
}

// ---- 8: determinism -------------------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  if (code != cli::kOk) std::fprintf(stderr, "command failed: %s\n", err.str().c_str());
  return code;
}

Verdict criterion_determinism() {
  testing::TempDir tmp;
  const std::string config = tmp.write("small.json", train::config_to_json(testing::small_train_config(3))).string();
  // Both runs read the same rule file, so config.json records the same path.
  const std::string rules = tmp.write("rules.json", nlr::rules_to_json(data::fixture_rules())).string();
  bool ok = true;
  for (const std::string run : {"a", "b"}) {
    const std::string root = (tmp / run).string();
    const std::string data = root + "/data";
    const std::vector<std::vector<std::string>> commands{
        {"preprocess", "--fixture", "--seed", "4", "--out-dir", data},
        {"train", "--data-dir", data, "--config", config, "--rules", rules, "--seed", "2", "--out-dir", root + "/train"},
        {"eval", "--data-dir", data, "--model", root + "/train/model", "--out-dir", root + "/eval"},
        {"eval", "--data-dir", data, "--scorer", "random", "--seed", "9", "--split", "dev", "--out-dir", root + "/eval"},
        {"ablate", "--data-dir", data, "--config", config, "--rules", rules, "--num-seeds", "2", "--out-dir",
         root + "/ablate"},
        {"curve", "--data-dir", data, "--config", config, "--rules", rules, "--sizes", "3,6", "--variants",
         "NLR,NLR-SU", "--num-seeds", "2", "--out-dir", root + "/curve"}};
    for (const auto& c : commands) ok = ok && cli(c) == cli::kOk;
  }
  const std::vector<std::string> outputs{
      "data/train.jsonl",     "data/dev.jsonl",         "data/test.jsonl",        "data/catalog.json",
      "train/metrics.jsonl",  "train/report.json",      "train/config.json",      "train/model/params.ckpt",
      "eval/eval_test.json",  "eval/eval_dev.json",     "ablate/ablation.json",   "ablate/ablation.txt",
      "curve/curve.csv",      "curve/curve_summary.csv"};
  std::size_t same = 0;
  std::string differ;
  for (const auto& f : outputs) {
    const auto a = tmp / ("a/" + f), b = tmp / ("b/" + f);
    if (std::filesystem::exists(a) && testing::read_file(a) == testing::read_file(b)) {
      ++same;
    } else {
      ok = false;
      differ += " " + f;
    }
  }
  return {ok ? Outcome::Pass : Outcome::Fail, "6 commands run twice, " + std::to_string(same) + "/" +
                                                  std::to_string(outputs.size()) + " output files byte-identical" +
                                                  (differ.empty() ? "" : "; differ:" + differ)};
}

// ---- 9: candidate sampling ---------------------------------------------------------------

Verdict criterion_sampling() {
  const std::size_t catalog = 187, gold = 42, draws = 10000;
  num::Rng rng(2024);
  std::vector<double> counts(catalog, 0.0), positions(10, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const auto set = data::make_candidates(gold, catalog, rng);
    for (std::size_t id : set.ids)
      if (id != gold) counts[id] += 1;
    positions[set.gold_index] += 1;
  }
  // Each of the 186 distractors should appear with p = 9/186 per draw.
  const double p = 9.0 / static_cast<double>(catalog - 1);
  const double expected = p * static_cast<double>(draws);
  const double sigma = std::sqrt(static_cast<double>(draws) * p * (1 - p));
  double chi2 = 0, worst_z = 0;
  for (std::size_t id = 0; id < catalog; ++id) {
    if (id == gold) continue;
    chi2 += (counts[id] - expected) * (counts[id] - expected) / expected;
    worst_z = std::max(worst_z, std::abs(counts[id] - expected) / sigma);
  }
  const double df = static_cast<double>(catalog - 2);
  double chi2_pos = 0;
  for (double c : positions) chi2_pos += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  const bool ok_items = std::abs(chi2 - df) <= 3 * std::sqrt(2 * df);
  const bool ok_pos = std::abs(chi2_pos - 9) <= 3 * std::sqrt(18.0);
  return {ok_items && ok_pos ? Outcome::Pass : Outcome::Fail,
          "distractor chi2 " + fmt("%.1f", chi2) + " (df " + fmt("%.0f", df) + ", 3 sigma band " +
              fmt("%.1f", 3 * std::sqrt(2 * df)) + "), max |z| " + fmt("%.2f", worst_z) + "; gold position chi2 " +
              fmt("%.2f", chi2_pos) + " (df 9)"};
}

}  // namespace
}  // namespace teachbot

int main() {
  using namespace teachbot;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 gradient suite", criterion_gradients},
      {"2 NLR oracle equivalence", criterion_oracle},
      {"3 closed-form matcher", criterion_closed_form},
      {"4 data pipeline statistics", criterion_data},
      {"5 overfit sanity", criterion_overfit},
      {"6 directional ablation", criterion_ablation},
      {"7 desk-scale replication", criterion_replication},
      {"8 determinism", criterion_determinism},
      {"9 candidate sampling", criterion_sampling},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
    if (v.outcome == Outcome::Fail) ++failures;
    std::printf("%s  [%s] %s\n", tag, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

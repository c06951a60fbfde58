#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "support/temp_dir.hpp"
#include "teachbot/data/dataset.hpp"
#include "teachbot/data/fixture.hpp"
#include "teachbot/data/kvret.hpp"
#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"

namespace teachbot {
namespace {

using data::Speaker;

const char* kSample = R"([
  {"dialogue": [
     {"turn": "driver", "data": {"end_dialogue": false, "utterance": "Actually I want French food"}},
     {"turn": "assistant", "data": {"end_dialogue": false, "utterance": "Sure, French it is.",
                                    "slots": {"cuisine": "French"}, "requested": {}}},
     {"turn": "assistant", "data": {"utterance": "Anything else?"}},
     {"turn": "driver", "data": {"utterance": "no"}}],
   "scenario": {"kb": {"items": [{"cuisine": "french", "area": "Palo Alto"}], "column_names": ["cuisine", "area"]},
                "task": {"intent": "navigate"}, "uuid": "d-1"}},
  {"dialogue": [{"turn": "driver", "data": {"utterance": "weather in Palo Alto"}},
                {"turn": "assistant", "data": {"utterance": "Palo Alto, right?"}}],
   "scenario": {"kb": {"items": null, "column_names": []}, "task": {"intent": "weather"}, "uuid": "d-2"}}
])";

// ---- loading ---------------------------------------------------------------------

TEST(Kvret, ParsesDialogs) {
  const auto d = data::parse_kvret(kSample);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].id, "d-1");
  EXPECT_EQ(d[0].domain, "navigate");
  ASSERT_EQ(d[0].turns.size(), 4u);
  EXPECT_EQ(d[0].turns[1].slots.at("cuisine"), "French");
  EXPECT_EQ(d[0].kb.at(0).at("area"), "Palo Alto");
  EXPECT_TRUE(d[1].kb.empty());
  EXPECT_EQ(data::filter_domain(d, "weather").size(), 1u);
  EXPECT_EQ(data::filter_domain(d, "all").size(), 2u);
}

std::string error_of(const std::string& text) {
  try {
    data::parse_kvret(text, "f.json");
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

TEST(Kvret, Errors) {
  EXPECT_THROW(data::parse_kvret("", "f.json"), SchemaError);
  EXPECT_THROW(data::parse_kvret("  \n", "f.json"), SchemaError);
  EXPECT_THROW(data::parse_kvret("[]", "f.json"), SchemaError);
  EXPECT_THROW(data::parse_kvret("[{", "f.json"), ParseError);
  const std::string ok = R"({"dialogue": [], "scenario": {"task": {"intent": "weather"}}})";
  EXPECT_NE(error_of("[" + ok + R"(, {"scenario": {"task": {"intent": "x"}}}])").find("dialog 1: missing 'dialogue'"),
            std::string::npos);
  EXPECT_NE(error_of(R"([{"dialogue": [{"turn": "robot", "data": {"utterance": "x"}}], "scenario": {"task": {"intent": "w"}}}])")
                .find("dialog 0 turn 0: unknown speaker"),
            std::string::npos);
}

TEST(Kvret, MissingSplitFile) {
  testing::TempDir dir;
  dir.write(std::string(data::kTrainFile), kSample);
  dir.write(std::string(data::kTestFile), kSample);
  EXPECT_THROW(data::load_kvret_dir(dir.path()), ConfigError);
}

TEST(Kvret, JsonRoundTrip) {
  const auto d = data::parse_kvret(kSample);
  const auto back = data::parse_kvret(data::kvret_to_json(d));
  EXPECT_EQ(data::kvret_to_json(back), data::kvret_to_json(d));
}

TEST(MergeTurns, JoinsSameSpeakerRuns) {
  const auto merged = data::merge_turns(data::parse_kvret(kSample)[0].turns);
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_EQ(merged[1].utterance, "Sure, French it is. Anything else?");
  EXPECT_EQ(merged[1].slots.at("cuisine"), "French");
  EXPECT_EQ(merged[2].speaker, Speaker::Driver);
}

// ---- delexicalization -------------------------------------------------------------

TEST(Delex, AnnotatedValuesBecomePlaceholders) {
  const auto turns = data::delexicalize_dialog(data::parse_kvret(kSample)[0]);
  EXPECT_EQ(enc::normalize(turns[0].delex), "actually i want <cuisine> food");
  EXPECT_EQ(enc::normalize(turns[1].delex), "sure , <cuisine> it is . anything else ?");
  EXPECT_EQ(turns[2].delex, "no");
}

TEST(Delex, AnnotationsOverrideKbSlotTypes) {
  data::RawDialog d;
  d.kb = {{{"poi", "Home"}}};
  d.turns = {{Speaker::Driver, "take me home", {}}, {Speaker::Assistant, "going home", {{"poi_type", "home"}}}};
  const auto turns = data::delexicalize_dialog(d);
  EXPECT_EQ(turns[0].delex, "take me <poi_type>");
}

TEST(Delex, RelexicalizationRoundTrip) {
  num::Rng rng(5);
  const auto corpus = data::make_fixture(rng);
  std::size_t mentions = 0;
  for (const auto* split : {&corpus.train, &corpus.dev, &corpus.test}) {
    for (const auto& d : *split) {
      for (const auto& t : data::delexicalize_dialog(d)) {
        EXPECT_EQ(enc::to_lower(data::relexicalize(t.delex, t.mentions)), enc::to_lower(t.original));
        mentions += t.mentions.size();
      }
    }
  }
  EXPECT_GT(mentions, 30u);
  // Lexicons are per dialog: the second sample dialog has no KB values.
  const auto t = data::delexicalize_dialog(data::parse_kvret(kSample)[1]);
  EXPECT_EQ(t[0].delex, "weather in Palo Alto");
  const auto u = data::delexicalize_dialog(data::parse_kvret(kSample)[0]);
  EXPECT_EQ(data::relexicalize(u[1].delex, u[1].mentions), "Sure, French it is. Anything else?");
}

// ---- candidates ---------------------------------------------------------------------

TEST(Candidates, Contract) {
  num::Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const std::size_t gold = rng.below(187);
    const auto c = data::make_candidates(gold, 187, rng);
    ASSERT_EQ(c.ids.size(), 10u);
    EXPECT_EQ(std::set<std::size_t>(c.ids.begin(), c.ids.end()).size(), 10u);
    EXPECT_EQ(std::count(c.ids.begin(), c.ids.end(), gold), 1);
    EXPECT_EQ(c.ids[c.gold_index], gold);
  }
}

TEST(Candidates, DeterministicPerSeed) {
  num::Rng a(77), b(77);
  for (int i = 0; i < 20; ++i) {
    const auto x = data::make_candidates(3, 50, a), y = data::make_candidates(3, 50, b);
    EXPECT_EQ(x.ids, y.ids);
    EXPECT_EQ(x.gold_index, y.gold_index);
  }
}

TEST(Candidates, SmallCatalog) {
  num::Rng rng(1);
  EXPECT_THROW(data::make_candidates(2, 6, rng), ConfigError);
  const auto c = data::make_candidates(2, 6, rng, true);
  EXPECT_EQ(c.ids, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(c.gold_index, 2u);
  EXPECT_THROW(data::make_candidates(6, 6, rng, true), ArgumentError);
}

TEST(Candidates, ExactlyTenTemplates) {
  num::Rng rng(1);
  const auto c = data::make_candidates(9, 10, rng);
  EXPECT_EQ(std::set<std::size_t>(c.ids.begin(), c.ids.end()).size(), 10u);
}

// ---- dataset -------------------------------------------------------------------------

data::DomainDataset fixture_dataset(std::uint64_t seed = 3) {
  num::Rng rng(seed);
  return data::build_dataset(data::make_fixture(rng), seed, {"all", true});
}

TEST(Fixture, DeterministicPerSeed) {
  num::Rng a(8), b(8), c(9);
  const auto x = data::make_fixture(a), y = data::make_fixture(b), z = data::make_fixture(c);
  EXPECT_EQ(data::kvret_to_json(x.train), data::kvret_to_json(y.train));
  EXPECT_EQ(data::kvret_to_json(x.test), data::kvret_to_json(y.test));
  EXPECT_NE(data::kvret_to_json(x.train), data::kvret_to_json(z.train));
}

TEST(Fixture, PassesDatasetInvariants) {
  const auto ds = fixture_dataset();
  EXPECT_EQ(ds.train.size(), 6u);
  EXPECT_EQ(ds.dev.size(), 2u);
  EXPECT_EQ(ds.test.size(), 2u);
  EXPECT_EQ(ds.catalog.actions.size(), 6u);
  EXPECT_EQ(ds.slot_types, (std::vector<std::string>{"city", "day"}));
  std::set<std::string> ids;
  for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
    for (const auto& d : *split) {
      EXPECT_TRUE(ids.insert(d.id).second);
      EXPECT_EQ(d.utterances, 20u);
      ASSERT_EQ(d.turns.size(), 10u);
      for (const auto& t : d.turns) {
        EXPECT_EQ(t.candidates, ds.catalog.actions.all_ids());
        EXPECT_EQ(t.candidates[t.gold_index], t.gold);
        EXPECT_EQ(ds.catalog.actions[t.gold].text, t.system);
      }
    }
  }
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_TRUE(ds.catalog.actions.find("it will rain in <city> on <day>.").has_value());
  EXPECT_EQ(ds.train[0].turns[1].prev_system, ds.catalog.actions[0].text);
}

bool is_forecast(const data::ProcessedTurn& t) { return t.system.rfind("it will", 0) == 0; }

TEST(Fixture, HeldOutQuestionsHaveUnseenCues) {
  const auto ds = fixture_dataset();
  std::set<std::string> train_words;
  for (const auto& d : ds.train)
    for (const auto& t : d.turns)
      for (const auto& w : enc::tokenize(t.user)) train_words.insert(w);
  std::size_t held_out = 0;
  for (const auto* split : {&ds.dev, &ds.test})
    for (const auto& d : *split)
      for (const auto& t : d.turns) {
        if (!is_forecast(t)) continue;
        ++held_out;
        std::size_t unseen = 0;
        for (const auto& w : enc::tokenize(t.user)) unseen += train_words.count(w) == 0;
        EXPECT_EQ(unseen, 1u) << t.user;
      }
  EXPECT_EQ(held_out, 16u);
}

TEST(Fixture, RulesNameCatalogTemplates) {
  const auto ds = fixture_dataset();
  const auto rules = data::fixture_rules();
  EXPECT_EQ(rules.u_rules.size(), 40u);
  EXPECT_EQ(rules.s_rules.size(), 1u);
  for (const auto* set : {&rules.u_rules, &rules.s_rules})
    for (const auto& r : set->rules) EXPECT_TRUE(ds.catalog.actions.find(r.post).has_value()) << r.post;
  // Every question a user asks has a rule with that exact pre-condition.
  std::set<std::string> pres;
  for (const auto& r : rules.u_rules.rules) pres.insert(enc::normalize(r.pre));
  for (const auto* split : {&ds.train, &ds.dev, &ds.test})
    for (const auto& d : *split)
      for (const auto& t : d.turns) {
        if (is_forecast(t)) {
          EXPECT_EQ(pres.count(t.user), 1u) << t.user;
        }
      }
}

TEST(Dataset, CatalogDedupAndCounts) {
  const auto ds = fixture_dataset();
  std::size_t total = 0;
  for (std::size_t c : ds.catalog.counts) total += c;
  EXPECT_EQ(total, 100u);
  EXPECT_EQ(ds.catalog.counts[0], 10u);
  const auto sunny = *ds.catalog.actions.find("it will be sunny in <city> on <day>.");
  const auto rain = *ds.catalog.actions.find("it will rain in <city> on <day>.");
  EXPECT_EQ(ds.catalog.counts[sunny], 20u);
  EXPECT_EQ(ds.catalog.counts[rain], 20u);
}

TEST(Dataset, RejectsDuplicateDialogIds) {
  num::Rng rng(1);
  auto corpus = data::make_fixture(rng);
  corpus.test[0].id = corpus.train[0].id;
  EXPECT_THROW(data::build_dataset(corpus, 1, {"all", true}), SchemaError);
}

TEST(Dataset, UnpairedTurns) {
  data::RawCorpus corpus;
  data::RawDialog d;
  d.id = "x";
  d.turns = {{Speaker::Assistant, "welcome", {}}, {Speaker::Driver, "hi", {}}, {Speaker::Assistant, "hello", {}},
             {Speaker::Driver, "bye", {}}};
  corpus.train.push_back(d);
  const auto ds = data::build_dataset(corpus, 0, {"all", true});
  ASSERT_EQ(ds.train[0].turns.size(), 2u);
  EXPECT_EQ(ds.train[0].turns[0].user, "");
  EXPECT_EQ(ds.train[0].turns[1].user, "hi");
  EXPECT_EQ(ds.train[0].utterances, 4u);
}

TEST(Stats, FixtureAndEmpty) {
  const auto ds = fixture_dataset();
  const auto s = data::dataset_stats(ds);
  EXPECT_EQ(s.dialogs, 10u);
  EXPECT_EQ(s.turns, 100u);
  EXPECT_DOUBLE_EQ(s.avg_turns_per_dialog, 20.0);
  EXPECT_EQ(s.templates, 6u);
  EXPECT_GT(s.avg_user_tokens, 1.0);
  EXPECT_GT(s.avg_system_tokens, 4.0);
  const auto e = data::dataset_stats({}, 0);
  EXPECT_EQ(e.dialogs, 0u);
  EXPECT_EQ(e.avg_turns_per_dialog, 0.0);
  EXPECT_EQ(e.avg_user_tokens, 0.0);
  EXPECT_EQ(e.avg_system_tokens, 0.0);
}

TEST(DatasetFiles, RoundTripAndByteIdentical) {
  testing::TempDir dir;
  data::write_dataset(dir / "a", fixture_dataset(4));
  data::write_dataset(dir / "b", fixture_dataset(4));
  for (const char* f : {"train.jsonl", "dev.jsonl", "test.jsonl", "catalog.json", "schema.json"})
    EXPECT_EQ(testing::read_file(dir / "a" / f), testing::read_file(dir / "b" / f)) << f;
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "a")) ++entries;
  EXPECT_EQ(entries, 5u);

  const auto back = data::read_dataset(dir / "a");
  const auto orig = fixture_dataset(4);
  EXPECT_EQ(back.catalog.actions.texts(), orig.catalog.actions.texts());
  EXPECT_EQ(back.catalog.counts, orig.catalog.counts);
  EXPECT_EQ(back.slot_types, orig.slot_types);
  EXPECT_EQ(back.lexicon.entries(), orig.lexicon.entries());
  ASSERT_EQ(back.train.size(), orig.train.size());
  for (std::size_t i = 0; i < back.train.size(); ++i) {
    ASSERT_EQ(back.train[i].turns.size(), orig.train[i].turns.size());
    for (std::size_t j = 0; j < back.train[i].turns.size(); ++j) {
      const auto &x = back.train[i].turns[j], &y = orig.train[i].turns[j];
      EXPECT_EQ(x.user, y.user);
      EXPECT_EQ(x.candidates, y.candidates);
      EXPECT_EQ(x.mentions, y.mentions);
      EXPECT_EQ(x.prev_system, y.prev_system);
    }
  }
  data::write_dataset(dir / "c", back);
  EXPECT_EQ(testing::read_file(dir / "a" / "train.jsonl"), testing::read_file(dir / "c" / "train.jsonl"));
}

TEST(DatasetFiles, CorruptLineNamed) {
  testing::TempDir dir;
  data::write_dataset(dir.path(), fixture_dataset());
  dir.write("dev.jsonl", "{\"dialog_id\": 3}\n");
  try {
    data::read_dataset(dir.path());
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("dev.jsonl:1"), std::string::npos);
  }
}

// Published split sizes; needs the public in-car data under $TEACHBOT_DATA.
TEST(RealData, SplitSizesMatchPublishedCounts) {
  const char* root = std::getenv("TEACHBOT_DATA");
  if (!root || !std::filesystem::exists(std::filesystem::path(root) / data::kTrainFile))
    GTEST_SKIP() << "TEACHBOT_DATA not set or in-car dialog files absent";
  const auto raw = data::load_kvret_dir(root);
  EXPECT_EQ(data::filter_domain(raw.train, "weather").size(), 797u);
  EXPECT_EQ(data::filter_domain(raw.dev, "weather").size(), 99u);
  EXPECT_EQ(data::filter_domain(raw.test, "weather").size(), 100u);
  EXPECT_EQ(data::filter_domain(raw.test, "schedule").size(), 104u);
}

}  // namespace
}  // namespace teachbot

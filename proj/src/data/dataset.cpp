#include "teachbot/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "teachbot/encoder/tokenize.hpp"
#include "teachbot/error.hpp"

namespace teachbot::data {

using nlohmann::json;

model::Lexicon dialog_lexicon(const RawDialog& dialog) {
  model::Lexicon lex;
  for (const auto& row : dialog.kb)
    for (const auto& [slot, value] : row) lex.add(slot, value);
  for (const auto& turn : dialog.turns)
    for (const auto& [slot, value] : turn.slots) lex.add(slot, value);
  return lex;
}

std::vector<DelexTurn> delexicalize_dialog(const RawDialog& dialog) {
  const model::Lexicon lex = dialog_lexicon(dialog);
  std::vector<DelexTurn> out;
  for (const auto& t : merge_turns(dialog.turns)) {
    DelexTurn d;
    d.speaker = t.speaker;
    d.original = t.utterance;
    d.mentions = model::extract_entities(t.utterance, lex);
    d.delex = model::delexicalize(t.utterance, d.mentions);
    out.push_back(std::move(d));
  }
  return out;
}

std::string relexicalize(const std::string& delex, const std::vector<model::Mention>& mentions) {
  std::string out;
  std::size_t next = 0, i = 0;
  while (i < delex.size()) {
    if (delex[i] == '<' && next < mentions.size()) {
      const std::string ph = "<" + mentions[next].slot + ">";
      if (delex.compare(i, ph.size(), ph) == 0) {
        out += mentions[next++].surface;
        i += ph.size();
        continue;
      }
    }
    out += delex[i++];
  }
  return out;
}

std::size_t TemplateCatalog::add(const std::string& text) {
  const std::size_t id = actions.add(text);
  if (id >= counts.size()) counts.resize(id + 1, 0);
  ++counts[id];
  return id;
}

CandidateSet make_candidates(std::size_t gold, std::size_t catalog_size, num::Rng& rng, bool small_catalog_fallback) {
  if (gold >= catalog_size) throw ArgumentError("make_candidates: gold id out of range");
  CandidateSet out;
  if (catalog_size < kCandidates) {
    if (!small_catalog_fallback) {
      throw ConfigError("catalog has " + std::to_string(catalog_size) + " templates; at least " +
                        std::to_string(kCandidates) + " are needed for candidate sampling");
    }
    for (std::size_t i = 0; i < catalog_size; ++i) out.ids.push_back(i);
    out.gold_index = gold;
    return out;
  }
  std::vector<std::size_t> pool;
  pool.reserve(catalog_size - 1);
  for (std::size_t i = 0; i < catalog_size; ++i)
    if (i != gold) pool.push_back(i);
  // Partial Fisher-Yates: the first nine slots become a uniform sample.
  for (std::size_t i = 0; i + 1 < kCandidates; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  out.ids.assign(pool.begin(), pool.begin() + (kCandidates - 1));
  out.gold_index = rng.below(kCandidates);
  out.ids.insert(out.ids.begin() + static_cast<std::ptrdiff_t>(out.gold_index), gold);
  return out;
}

const std::vector<ProcessedDialog>& DomainDataset::split(std::string_view name) const {
  if (name == "train") return train;
  if (name == "dev") return dev;
  if (name == "test") return test;
  throw ArgumentError("unknown split '" + std::string(name) + "'");
}

namespace {

ProcessedDialog process_dialog(const RawDialog& raw, TemplateCatalog& catalog) {
  ProcessedDialog out;
  out.id = raw.id;
  out.domain = raw.domain;
  const auto turns = delexicalize_dialog(raw);
  out.utterances = turns.size();
  std::string prev;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const DelexTurn* user = nullptr;
    if (turns[i].speaker == Speaker::Driver) {
      if (i + 1 >= turns.size()) break;  // no reply
      user = &turns[i++];
    }
    const DelexTurn& system = turns[i];
    ProcessedTurn t;
    t.dialog_id = raw.id;
    t.turn_index = out.turns.size();
    if (user) {
      t.user = enc::normalize(user->delex);
      t.mentions = user->mentions;
      t.user_tokens = enc::tokenize(user->original).size();
    }
    t.system = enc::normalize(system.delex);
    t.system_tokens = enc::tokenize(system.original).size();
    t.gold = catalog.add(t.system);
    t.prev_system = prev;
    prev = t.system;
    out.turns.push_back(std::move(t));
  }
  return out;
}

}  // namespace

DomainDataset build_dataset(const RawCorpus& raw, std::uint64_t seed, const BuildOptions& options) {
  DomainDataset ds;
  ds.domain = options.domain;
  ds.seed = seed;
  std::set<std::string> ids;
  std::set<std::string> slots;
  auto process = [&](const std::vector<RawDialog>& dialogs, std::vector<ProcessedDialog>& out) {
    for (const auto& d : filter_domain(dialogs, options.domain)) {
      if (!ids.insert(d.id).second) throw SchemaError("dialog id '" + d.id + "' appears more than once");
      const model::Lexicon lex = dialog_lexicon(d);
      for (const auto& [value, slot] : lex.entries()) slots.insert(slot);
      ds.lexicon.merge(lex);
      out.push_back(process_dialog(d, ds.catalog));
    }
  };
  process(raw.train, ds.train);
  process(raw.dev, ds.dev);
  process(raw.test, ds.test);
  ds.slot_types.assign(slots.begin(), slots.end());

  num::Rng rng(seed);
  for (auto* split : {&ds.train, &ds.dev, &ds.test}) {
    for (auto& dialog : *split) {
      for (auto& turn : dialog.turns) {
        auto c = make_candidates(turn.gold, ds.catalog.actions.size(), rng, options.small_catalog_fallback);
        turn.candidates = std::move(c.ids);
        turn.gold_index = c.gold_index;
      }
    }
  }
  return ds;
}

DatasetStats dataset_stats(const std::vector<ProcessedDialog>& dialogs, std::size_t templates) {
  DatasetStats s;
  s.templates = templates;
  s.dialogs = dialogs.size();
  std::size_t utterances = 0, user_tokens = 0, system_tokens = 0, user_turns = 0;
  for (const auto& d : dialogs) {
    utterances += d.utterances;
    for (const auto& t : d.turns) {
      ++s.turns;
      system_tokens += t.system_tokens;
      if (t.user_tokens > 0) {
        ++user_turns;
        user_tokens += t.user_tokens;
      }
    }
  }
  if (s.dialogs > 0) s.avg_turns_per_dialog = static_cast<double>(utterances) / static_cast<double>(s.dialogs);
  if (user_turns > 0) s.avg_user_tokens = static_cast<double>(user_tokens) / static_cast<double>(user_turns);
  if (s.turns > 0) s.avg_system_tokens = static_cast<double>(system_tokens) / static_cast<double>(s.turns);
  return s;
}

DatasetStats dataset_stats(const DomainDataset& ds) {
  std::vector<ProcessedDialog> all = ds.train;
  all.insert(all.end(), ds.dev.begin(), ds.dev.end());
  all.insert(all.end(), ds.test.begin(), ds.test.end());
  return dataset_stats(all, ds.catalog.actions.size());
}

// ---- files --------------------------------------------------------------------------

namespace {

json turn_json(const ProcessedTurn& t, const ProcessedDialog& d) {
  json mentions = json::array();
  for (const auto& m : t.mentions)
    mentions.push_back({{"slot", m.slot}, {"surface", m.surface}, {"begin", m.begin}, {"end", m.end}});
  return {{"dialog_id", t.dialog_id},
          {"domain", d.domain},
          {"dialog_utterances", d.utterances},
          {"turn_index", t.turn_index},
          {"user", t.user},
          {"system", t.system},
          {"prev_system", t.prev_system},
          {"gold_template_id", t.gold},
          {"candidate_ids", t.candidates},
          {"gold_index", t.gold_index},
          {"mentions", mentions},
          {"user_tokens", t.user_tokens},
          {"system_tokens", t.system_tokens}};
}

std::string split_jsonl(const std::vector<ProcessedDialog>& dialogs) {
  std::string out;
  for (const auto& d : dialogs)
    for (const auto& t : d.turns) out += turn_json(t, d).dump() + "\n";
  return out;
}

std::string schema_json(const DomainDataset& ds) {
  std::map<std::string, std::vector<std::string>> values;
  for (const auto& [value, slot] : ds.lexicon.entries()) values[slot].push_back(value);
  json splits;
  for (const char* name : {"train", "dev", "test"}) {
    const auto& s = ds.split(name);
    std::size_t turns = 0;
    for (const auto& d : s) turns += d.turns.size();
    splits[name] = {{"dialogs", s.size()}, {"turns", turns}};
  }
  return json{{"domain", ds.domain},
              {"seed", ds.seed},
              {"candidates", kCandidates},
              {"slot_types", ds.slot_types},
              {"lexicon", values},
              {"splits", splits}}
             .dump(1) +
         "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ProcessedDialog> read_split(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<ProcessedDialog> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ProcessedTurn t;
      t.dialog_id = j.at("dialog_id").get<std::string>();
      t.turn_index = j.at("turn_index").get<std::size_t>();
      t.user = j.at("user").get<std::string>();
      t.system = j.at("system").get<std::string>();
      t.prev_system = j.at("prev_system").get<std::string>();
      t.gold = j.at("gold_template_id").get<std::size_t>();
      t.candidates = j.at("candidate_ids").get<std::vector<std::size_t>>();
      t.gold_index = j.at("gold_index").get<std::size_t>();
      t.user_tokens = j.at("user_tokens").get<std::size_t>();
      t.system_tokens = j.at("system_tokens").get<std::size_t>();
      for (const auto& m : j.at("mentions"))
        t.mentions.push_back({m.at("slot").get<std::string>(), m.at("surface").get<std::string>(),
                              m.at("begin").get<std::size_t>(), m.at("end").get<std::size_t>()});
      if (t.gold_index >= t.candidates.size() || t.candidates[t.gold_index] != t.gold)
        throw SchemaError("gold_index does not point at the gold template");
      if (out.empty() || out.back().id != t.dialog_id) {
        out.push_back({t.dialog_id, j.at("domain").get<std::string>(), j.at("dialog_utterances").get<std::size_t>(), {}});
      }
      out.back().turns.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string catalog_to_json(const TemplateCatalog& catalog) {
  json items = json::array();
  for (const auto& t : catalog.actions.items())
    items.push_back({{"id", t.id}, {"text", t.text}, {"count", catalog.counts.at(t.id)}, {"is_api", t.is_api}});
  return json{{"templates", items}}.dump(1) + "\n";
}

TemplateCatalog read_catalog(const std::filesystem::path& path) {
  TemplateCatalog c;
  try {
    const json j = json::parse(read_text(path));
    for (const auto& item : j.at("templates")) {
      const std::size_t id = c.actions.add(item.at("text").get<std::string>());
      if (id != item.at("id").get<std::size_t>() || id != c.counts.size())
        throw SchemaError("template ids must be dense, unique and in order");
      c.counts.push_back(item.at("count").get<std::size_t>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return c;
}

void write_dataset(const std::filesystem::path& dir, const DomainDataset& ds) {
  const std::vector<std::pair<std::string, std::string>> files{
      {"train.jsonl", split_jsonl(ds.train)}, {"dev.jsonl", split_jsonl(ds.dev)},
      {"test.jsonl", split_jsonl(ds.test)},   {"catalog.json", catalog_to_json(ds.catalog)},
      {"schema.json", schema_json(ds)}};
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / ("." + name + ".tmp"), std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  }
  for (const auto& [name, body] : files) std::filesystem::rename(dir / ("." + name + ".tmp"), dir / name);
}

DomainDataset read_dataset(const std::filesystem::path& dir) {
  DomainDataset ds;
  ds.catalog = read_catalog(dir / "catalog.json");
  try {
    const json schema = json::parse(read_text(dir / "schema.json"));
    ds.domain = schema.at("domain").get<std::string>();
    ds.seed = schema.at("seed").get<std::uint64_t>();
    ds.slot_types = schema.at("slot_types").get<std::vector<std::string>>();
    for (const auto& [slot, values] : schema.at("lexicon").items())
      for (const auto& v : values) ds.lexicon.add(slot, v.get<std::string>());
  } catch (const json::exception& e) {
    throw SchemaError((dir / "schema.json").string() + ": " + e.what());
  }
  ds.train = read_split(dir / "train.jsonl");
  ds.dev = read_split(dir / "dev.jsonl");
  ds.test = read_split(dir / "test.jsonl");
  for (const auto* split : {&ds.train, &ds.dev, &ds.test})
    for (const auto& d : *split)
      for (const auto& t : d.turns)
        for (std::size_t id : t.candidates)
          if (id >= ds.catalog.actions.size())
            throw SchemaError("dialog " + d.id + ": candidate id " + std::to_string(id) + " not in catalog");
  return ds;
}

}  // namespace teachbot::data

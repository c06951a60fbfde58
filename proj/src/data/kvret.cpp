#include "teachbot/data/kvret.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "teachbot/error.hpp"

namespace teachbot::data {

using nlohmann::json;

namespace {

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

RawDialog parse_dialog(const json& d, const std::string& where) {
  if (!d.is_object()) throw SchemaError(where + ": expected an object");
  for (const char* key : {"dialogue", "scenario"})
    if (!d.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  const json& scenario = d["scenario"];
  if (!scenario.is_object()) throw SchemaError(where + ": 'scenario' must be an object");
  RawDialog out;
  if (!scenario.contains("task") || !scenario["task"].is_object() || !scenario["task"].contains("intent"))
    throw SchemaError(where + ": missing 'scenario.task.intent'");
  out.domain = value_text(scenario["task"]["intent"]);
  if (scenario.contains("uuid")) out.id = value_text(scenario["uuid"]);
  if (scenario.contains("kb") && scenario["kb"].is_object()) {
    const json& kb = scenario["kb"];
    if (kb.contains("column_names") && kb["column_names"].is_array())
      for (const auto& c : kb["column_names"]) out.kb_columns.push_back(value_text(c));
    if (kb.contains("items") && kb["items"].is_array()) {
      for (const auto& item : kb["items"]) {
        if (!item.is_object()) throw SchemaError(where + ": kb item must be an object");
        KbRow row;
        for (const auto& [k, v] : item.items()) row[k] = value_text(v);
        out.kb.push_back(std::move(row));
      }
    }
  }
  const json& dialogue = d["dialogue"];
  if (!dialogue.is_array()) throw SchemaError(where + ": 'dialogue' must be a list");
  for (std::size_t t = 0; t < dialogue.size(); ++t) {
    const json& turn = dialogue[t];
    const std::string tw = where + " turn " + std::to_string(t);
    if (!turn.is_object() || !turn.contains("turn") || !turn.contains("data"))
      throw SchemaError(tw + ": missing 'turn' or 'data'");
    RawTurn rt;
    const std::string speaker = value_text(turn["turn"]);
    if (speaker == "driver") rt.speaker = Speaker::Driver;
    else if (speaker == "assistant") rt.speaker = Speaker::Assistant;
    else throw SchemaError(tw + ": unknown speaker '" + speaker + "'");
    const json& data = turn["data"];
    if (!data.is_object() || !data.contains("utterance")) throw SchemaError(tw + ": missing 'data.utterance'");
    rt.utterance = value_text(data["utterance"]);
    if (data.contains("slots") && data["slots"].is_object())
      for (const auto& [k, v] : data["slots"].items()) rt.slots[k] = value_text(v);
    out.turns.push_back(std::move(rt));
  }
  return out;
}

}  // namespace

std::vector<RawDialog> parse_kvret(std::string_view text, std::string_view source) {
  const std::string src(source);
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw SchemaError(src + ": empty file");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(src + ": " + e.what());
  }
  if (!doc.is_array()) throw SchemaError(src + ": expected a list of dialogs");
  if (doc.empty()) throw SchemaError(src + ": no dialogs");
  std::vector<RawDialog> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(parse_dialog(doc[i], src + ": dialog " + std::to_string(i)));
    if (out.back().id.empty()) out.back().id = src + "#" + std::to_string(i);
  }
  return out;
}

std::vector<RawDialog> load_kvret(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kvret(ss.str(), path.filename().string());
}

RawCorpus load_kvret_dir(const std::filesystem::path& dir) {
  for (auto name : {kTrainFile, kDevFile, kTestFile}) {
    if (!std::filesystem::is_regular_file(dir / name))
      throw ConfigError("missing data file " + (dir / name).string());
  }
  return {load_kvret(dir / kTrainFile), load_kvret(dir / kDevFile), load_kvret(dir / kTestFile)};
}

std::string kvret_to_json(const std::vector<RawDialog>& dialogs) {
  json doc = json::array();
  for (const auto& d : dialogs) {
    json turns = json::array();
    for (const auto& t : d.turns) {
      json data{{"utterance", t.utterance}};
      if (!t.slots.empty()) data["slots"] = t.slots;
      turns.push_back({{"turn", t.speaker == Speaker::Driver ? "driver" : "assistant"}, {"data", data}});
    }
    json kb{{"column_names", d.kb_columns}, {"items", d.kb}};
    doc.push_back({{"dialogue", turns}, {"scenario", {{"kb", kb}, {"task", {{"intent", d.domain}}}, {"uuid", d.id}}}});
  }
  return doc.dump(1) + "\n";
}

std::vector<RawDialog> filter_domain(const std::vector<RawDialog>& dialogs, std::string_view domain) {
  if (domain == "all") return dialogs;
  std::vector<RawDialog> out;
  for (const auto& d : dialogs)
    if (d.domain == domain) out.push_back(d);
  return out;
}

std::vector<RawTurn> merge_turns(const std::vector<RawTurn>& turns) {
  std::vector<RawTurn> out;
  for (const auto& t : turns) {
    if (!out.empty() && out.back().speaker == t.speaker) {
      RawTurn& last = out.back();
      if (!t.utterance.empty()) last.utterance += last.utterance.empty() ? t.utterance : " " + t.utterance;
      for (const auto& [k, v] : t.slots) last.slots[k] = v;
    } else {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace teachbot::data

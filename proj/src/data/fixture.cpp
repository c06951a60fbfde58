#include "teachbot/data/fixture.hpp"

#include <array>
#include <string>

namespace teachbot::data {

namespace {

constexpr std::array<const char*, 6> kTemplates{
    "which city do you want the forecast for?",
    "which day are you asking about?",
    "it will be sunny in <city> on <day>.",
    "it will rain in <city> on <day>.",
    "anything else i can help with?",
    "you're welcome, drive safely!",
};
constexpr std::size_t kSunny = 2, kRain = 3;

// Every forecast question is "<cue> on <day>?". The cue is the only word
// that tells rain from sunshine, and each cue is used once in the corpus.
constexpr const char* kQuestion = "{cue} on {day}?";
constexpr std::size_t kCues = 20;
constexpr std::array<const char*, kCues> kRainCues{
    "rain",      "showers",  "drizzle", "storms",  "thunder",       "hail",      "sleet",
    "downpours", "puddles",  "lightning", "rainfall", "flooding",   "squalls",   "wetness",
    "precipitation", "raindrops", "monsoons", "cloudbursts", "thunderstorms", "gales",
};
constexpr std::array<const char*, kCues> kSunCues{
    "sunshine", "sunlight", "sunbeams", "sunrays",  "sunniness", "warmth",   "heat",
    "heatwaves", "brightness", "glare", "radiance", "dryness",   "balminess", "mildness",
    "calmness", "stillness", "clarity", "fairness", "blueness",  "dazzle",
};
constexpr std::array<const char*, 3> kCities{"Seattle", "Boston", "Denver"};
constexpr std::array<const char*, 3> kDays{"Monday", "Friday", "Sunday"};
constexpr std::array<const char*, 3> kGreetings{"hi there", "hello", "hey car"};
constexpr std::array<const char*, 3> kCityReplies{"{city} please", "i'm in {city}", "for {city}"};
constexpr std::array<const char*, 3> kAcks{"ok", "got it", "alright"};
constexpr std::array<const char*, 3> kThanks{"thanks, bye", "thank you", "great thanks"};

std::string fill_in(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t p; (p = text.find(key)) != std::string::npos;) text.replace(p, key.size(), value);
  return text;
}

std::string ask(bool rain, std::size_t cue, const std::string& day) {
  return fill_in(fill_in(kQuestion, "{cue}", rain ? kRainCues[cue] : kSunCues[cue]), "{day}", day);
}

template <std::size_t N>
const char* pick(const std::array<const char*, N>& options, num::Rng& rng) {
  return options[rng.below(N)];
}

}  // namespace

RawCorpus make_fixture(num::Rng& rng) {
  std::array<std::size_t, kCues> rain{}, sun{};
  for (std::size_t i = 0; i < kCues; ++i) rain[i] = sun[i] = i;
  rng.shuffle(std::span<std::size_t>(rain));
  rng.shuffle(std::span<std::size_t>(sun));
  // Question classes are shuffled corpus-wide so the number of rain
  // questions in a dialog varies and earlier answers say nothing about
  // later ones.
  std::array<bool, 2 * kCues> is_rain{};
  for (std::size_t q = 0; q < kCues; ++q) is_rain[q] = true;
  rng.shuffle(std::span<bool>(is_rain));
  std::size_t next_rain = 0, next_sun = 0;

  RawCorpus corpus;
  for (std::size_t i = 0; i < 10; ++i) {
    RawDialog d;
    d.id = "fixture-" + std::to_string(i);
    d.domain = "weather";
    const std::string city = pick(kCities, rng);
    d.kb_columns = {"city", "day"};
    for (const char* day : kDays) d.kb.push_back({{"city", city}, {"day", day}});

    auto driver = [&](std::string text) { d.turns.push_back({Speaker::Driver, std::move(text), {}}); };
    auto assistant = [&](std::size_t t, const std::string& day) {
      RawTurn turn{Speaker::Assistant, fill_in(fill_in(kTemplates[t], "<city>", city), "<day>", day), {}};
      if (t == kSunny || t == kRain) turn.slots = {{"city", city}, {"day", day}};
      d.turns.push_back(std::move(turn));
    };

    driver(pick(kGreetings, rng));
    assistant(0, "");
    driver(fill_in(pick(kCityReplies, rng), "{city}", city));
    assistant(1, "");
    for (std::size_t q = 4 * i; q < 4 * i + 4; ++q) {
      if (q > 4 * i) {
        driver(pick(kAcks, rng));
        assistant(4, "");
      }
      const std::string day = pick(kDays, rng);
      const std::size_t cue = is_rain[q] ? rain[next_rain++] : sun[next_sun++];
      driver(ask(is_rain[q], cue, day));
      assistant(is_rain[q] ? kRain : kSunny, day);
    }
    driver(pick(kThanks, rng));
    assistant(5, "");
    (i < 6 ? corpus.train : i < 8 ? corpus.dev : corpus.test).push_back(std::move(d));
  }
  return corpus;
}

nlr::RuleBook fixture_rules() {
  nlr::RuleBook book;
  book.u_rules.kind = nlr::RuleKind::User;
  book.s_rules.kind = nlr::RuleKind::System;
  for (std::size_t cue = 0; cue < kCues; ++cue) book.u_rules.rules.push_back({ask(true, cue, "<day>"), kTemplates[kRain]});
  for (std::size_t cue = 0; cue < kCues; ++cue) book.u_rules.rules.push_back({ask(false, cue, "<day>"), kTemplates[kSunny]});
  book.s_rules.rules.push_back({kTemplates[0], kTemplates[1]});
  return book;
}

}  // namespace teachbot::data

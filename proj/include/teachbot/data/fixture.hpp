#pragma once

#include "teachbot/data/kvret.hpp"
#include "teachbot/nlr/rules.hpp"
#include "teachbot/numcore/random.hpp"

namespace teachbot::data {

/// Ten weather dialogs (6 train, 2 dev, 2 test) over six response templates
/// and two slot types (city, day), in the raw in-car JSON layout. Each
/// dialog asks four forecast questions of the form "<cue> on <day>?"; 20
/// are about rain and 20 about sunshine, shuffled across the corpus. Each
/// cue word occurs once in the whole corpus, so held-out questions cannot
/// be answered from training text alone.
RawCorpus make_fixture(num::Rng& rng);

/// One u-rule per question (40) naming its gold response, plus an s-rule
/// for the fixed city -> day question order.
nlr::RuleBook fixture_rules();

}  // namespace teachbot::data

#pragma once

#include "teachbot/data/dataset.hpp"
#include "teachbot/data/fixture.hpp"
#include "teachbot/train/trainer.hpp"

namespace teachbot::testing {

inline data::DomainDataset fixture_dataset(std::uint64_t seed = 3) {
  num::Rng rng(seed);
  return data::build_dataset(data::make_fixture(rng), seed, {"all", true});
}

// Small dimensions so training runs finish in well under a second.
inline train::TrainConfig small_train_config(std::size_t epochs = 3) {
  train::TrainConfig c;
  c.model.dims = {8, 6};
  c.model.context_hidden = 10;
  c.max_epochs = epochs;
  return c;
}

}  // namespace teachbot::testing

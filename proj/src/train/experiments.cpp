#include "teachbot/train/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "teachbot/error.hpp"
#include "teachbot/train/evaluate.hpp"

namespace teachbot::train {

namespace {

double test_recall1(const TrainConfig& config, const data::DomainDataset& ds, const nlr::RuleBook& rules) {
  const auto result = fit(config, ds, rules);
  return evaluate(*result.model, ds.test).overall.r1;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::vector<AblationRow> ablate(const TrainConfig& base, const data::DomainDataset& ds, const nlr::RuleBook& rules,
                                std::size_t seeds) {
  if (seeds == 0) throw ArgumentError("ablate: need at least one seed");
  std::vector<AblationRow> rows;
  for (auto v : {model::Variant::Nlr, model::Variant::NlrS, model::Variant::NlrU, model::Variant::NlrSU}) {
    AblationRow row{v, {}, 0.0};
    for (std::size_t s = 0; s < seeds; ++s) {
      TrainConfig c = base;
      c.model.variant = v;
      c.seed = base.seed + s;
      row.recall1.push_back(test_recall1(c, ds, rules));
    }
    row.mean = mean_of(row.recall1);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "variant  recall@1  per-seed\n";
  for (const auto& r : rows) {
    std::string name = model::variant_name(r.variant);
    name.resize(std::max<std::size_t>(name.size(), 7), ' ');
    out << name << "  " << fixed(r.mean) << "   ";
    for (std::size_t i = 0; i < r.recall1.size(); ++i) out << (i ? " " : "") << fixed(r.recall1[i]);
    out << "\n";
  }
  return out.str();
}

std::string ablation_json(const std::vector<AblationRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    j.push_back({{"variant", model::variant_name(r.variant)}, {"recall1", r.recall1}, {"mean", r.mean}});
  return j.dump(2) + "\n";
}

data::DomainDataset subsample_train(const data::DomainDataset& ds, std::size_t size, std::uint64_t seed) {
  if (size > ds.train.size())
    throw ArgumentError("curve size " + std::to_string(size) + " exceeds the " + std::to_string(ds.train.size()) +
                        " training dialogs");
  std::vector<std::size_t> order(ds.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  num::Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  data::DomainDataset out = ds;
  out.train.clear();
  for (std::size_t i = 0; i < size; ++i) out.train.push_back(ds.train[order[i]]);
  return out;
}

std::vector<CurvePoint> learning_curve(const TrainConfig& base, const data::DomainDataset& ds,
                                       const nlr::RuleBook& rules, const std::vector<std::size_t>& sizes,
                                       std::size_t seeds, const std::vector<model::Variant>& variants) {
  for (std::size_t size : sizes)
    if (size > ds.train.size())
      throw ArgumentError("curve size " + std::to_string(size) + " exceeds the " + std::to_string(ds.train.size()) +
                          " training dialogs");
  std::vector<CurvePoint> points;
  for (std::size_t size : sizes)
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::uint64_t seed = base.seed + s;
      const data::DomainDataset sub = subsample_train(ds, size, seed);
      for (auto v : variants) {
        TrainConfig c = base;
        c.model.variant = v;
        c.seed = seed;
        c.train_size.reset();
        points.push_back({size, seed, v, test_recall1(c, sub, rules)});
      }
    }
  return points;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "size,seed,variant,recall1\n";
  for (const auto& p : points)
    out += std::to_string(p.size) + "," + std::to_string(p.seed) + "," + model::variant_name(p.variant) + "," +
           fixed(p.recall1, 6) + "\n";
  return out;
}

std::vector<CurveSummary> summarize(const std::vector<CurvePoint>& points) {
  std::vector<CurveSummary> out;
  std::vector<std::vector<double>> values;
  for (const auto& p : points) {
    std::size_t i = 0;
    while (i < out.size() && !(out[i].size == p.size && out[i].variant == p.variant)) ++i;
    if (i == out.size()) {
      out.push_back({p.size, p.variant, 0.0, 0.0});
      values.emplace_back();
    }
    values[i].push_back(p.recall1);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean = mean_of(values[i]);
    double ss = 0;
    for (double x : values[i]) ss += (x - out[i].mean) * (x - out[i].mean);
    out[i].std = std::sqrt(ss / static_cast<double>(values[i].size()));
  }
  return out;
}

}  // namespace teachbot::train

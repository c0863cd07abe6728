#include "xlsent/eval.hpp"

#include <cmath>
#include <string>

#include "xlsent/corpus.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/random.hpp"

namespace xlsent {

namespace {

void check_labels(std::span<const std::size_t> labels, std::size_t classes, const char* what) {
  for (std::size_t label : labels) {
    if (label >= classes) {
      throw ArgumentError(std::string(what) + ": label " + std::to_string(label) + " outside " +
                          std::to_string(classes) + " classes");
    }
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double macro_from_confusion(const std::vector<std::vector<std::size_t>>& confusion) {
  const std::size_t classes = confusion.size();
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t predicted = 0, gold = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      predicted += confusion[k][c];
      gold += confusion[c][k];
    }
    const double p = ratio(confusion[c][c], predicted);
    const double r = ratio(confusion[c][c], gold);
    total += (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return total / static_cast<double>(classes);
}

}  // namespace

EvalReport evaluate(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                    std::size_t classes) {
  if (gold.size() != predicted.size()) {
    throw ArgumentError("evaluate: " + std::to_string(gold.size()) + " gold labels vs " +
                        std::to_string(predicted.size()) + " predictions");
  }
  if (gold.empty()) throw ArgumentError("evaluate: no instances");
  if (classes == 0) throw ArgumentError("evaluate: zero classes");
  check_labels(gold, classes, "evaluate");
  check_labels(predicted, classes, "evaluate");

  EvalReport report;
  report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++report.confusion[gold[i]][predicted[i]];

  report.per_class.resize(classes);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t predicted_c = 0, gold_c = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      predicted_c += report.confusion[k][c];
      gold_c += report.confusion[c][k];
    }
    auto& scores = report.per_class[c];
    scores.support = gold_c;
    scores.precision = ratio(report.confusion[c][c], predicted_c);
    scores.recall = ratio(report.confusion[c][c], gold_c);
    const double denom = scores.precision + scores.recall;
    scores.f1 = denom == 0.0 ? 0.0 : 2.0 * scores.precision * scores.recall / denom;
    f1_sum += scores.f1;
  }
  report.macro_f1 = f1_sum / static_cast<double>(classes);
  return report;
}

double macro_f1(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                std::size_t classes) {
  return evaluate(gold, predicted, classes).macro_f1;
}

nlohmann::json EvalReport::to_json(const LabelSchema* schema) const {
  nlohmann::json out;
  out["macro_f1"] = macro_f1;
  nlohmann::json classes = nlohmann::json::object();
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const std::string key = schema ? schema->name(c) : std::to_string(c);
    classes[key] = {{"precision", per_class[c].precision},
                    {"recall", per_class[c].recall},
                    {"f1", per_class[c].f1},
                    {"support", per_class[c].support}};
  }
  out["per_class"] = std::move(classes);
  out["confusion"] = confusion;
  if (p_value) out["p_value"] = *p_value;
  return out;
}

double approx_randomization(std::span<const std::size_t> gold, std::span<const std::size_t> predicted_a,
                            std::span<const std::size_t> predicted_b, std::size_t classes,
                            std::size_t rounds, std::uint64_t seed) {
  if (gold.size() != predicted_a.size() || gold.size() != predicted_b.size()) {
    throw ArgumentError("approx_randomization: prediction lengths differ from gold");
  }
  if (gold.empty()) throw ArgumentError("approx_randomization: no instances");
  if (rounds == 0) throw ArgumentError("approx_randomization: rounds must be >= 1");
  check_labels(gold, classes, "approx_randomization");
  check_labels(predicted_a, classes, "approx_randomization");
  check_labels(predicted_b, classes, "approx_randomization");

  const double observed = std::abs(macro_f1(gold, predicted_a, classes) - macro_f1(gold, predicted_b, classes));
  // Guards against ties lost to rounding in the F1 arithmetic.
  constexpr double kSlack = 1e-12;

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> conf_a(classes, std::vector<std::size_t>(classes));
  std::vector<std::vector<std::size_t>> conf_b(classes, std::vector<std::size_t>(classes));
  std::size_t hits = 0;
  for (std::size_t round = 0; round < rounds; ++round) {
    for (auto& row : conf_a) std::fill(row.begin(), row.end(), 0);
    for (auto& row : conf_b) std::fill(row.begin(), row.end(), 0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool swap = rng.bernoulli(0.5);
      ++conf_a[gold[i]][swap ? predicted_b[i] : predicted_a[i]];
      ++conf_b[gold[i]][swap ? predicted_a[i] : predicted_b[i]];
    }
    const double statistic = std::abs(macro_from_confusion(conf_a) - macro_from_confusion(conf_b));
    if (statistic >= observed - kSlack) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(rounds + 1);
}

}  // namespace xlsent

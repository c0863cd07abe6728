#pragma once

// Shared optimizer loop for the sentence-level and targeted models.
//
// An Objective exposes:
//   std::size_t example_count() const;
//   std::size_t pair_count() const;
//   std::vector<Matrix*> parameters();
//   LossTerms accumulate(std::span<const std::size_t> examples,
//                        std::span<const std::size_t> pairs, double alpha,
//                        std::vector<Matrix>& grads);   // grads zeroed by the caller
//   bool all_oov() const;
//   void fill_dev_metrics(EpochRecord& record) const;

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "xlsent/blse.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/random.hpp"

namespace xlsent::detail {

// Stream ids for seeds derived from TrainConfig::seed.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kShuffleStream = 1;

template <class Objective>
TrainHistory run_training(const TrainConfig& config, Objective& objective) {
  const std::size_t examples = objective.example_count();
  const std::size_t pairs = objective.pair_count();
  if (examples == 0) throw ArgumentError("train: empty sentiment corpus");
  if (pairs == 0) throw ArgumentError("train: no lexicon pair is covered by both embedding spaces");

  std::vector<Matrix*> params = objective.parameters();
  std::vector<AdamState> states;
  std::vector<Matrix> grads;
  for (Matrix* p : params) {
    states.emplace_back(p->rows(), p->cols(), config.learning_rate);
    grads.emplace_back(p->rows(), p->cols());
  }

  Rng rng(mix_seed(config.seed, kShuffleStream));
  std::vector<std::size_t> order(examples);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t pair_batch = std::min(config.batch_size, pairs);
  std::size_t pair_cursor = 0;
  std::vector<std::size_t> pair_rows(pair_batch);

  TrainHistory history;
  history.records.reserve(config.epochs);
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    LossTerms sums;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < examples; start += config.batch_size) {
      const std::size_t stop = std::min(examples, start + config.batch_size);
      std::span<const std::size_t> rows(order.data() + start, stop - start);
      for (std::size_t k = 0; k < pair_batch; ++k) pair_rows[k] = (pair_cursor + k) % pairs;
      pair_cursor = (pair_cursor + pair_batch) % pairs;

      for (Matrix& g : grads) g *= 0.0;
      const LossTerms terms = objective.accumulate(rows, pair_rows, config.alpha, grads);
      for (std::size_t k = 0; k < params.size(); ++k) adam_step(*params[k], grads[k], states[k]);

      sums.joint += terms.joint;
      sums.sentiment += terms.sentiment;
      sums.projection += terms.projection;
      ++batches;
    }

    if (epoch == 1 && objective.all_oov()) {
      throw TrainingError("train: every training instance is out of vocabulary");
    }

    EpochRecord record;
    record.epoch = epoch;
    record.sentiment_loss = sums.sentiment / static_cast<double>(batches);
    record.projection_loss = sums.projection / static_cast<double>(batches);
    record.joint_loss = sums.joint / static_cast<double>(batches);
    record.dev_pair_cosine = kMissing;
    record.source_dev_f1 = kMissing;
    record.target_dev_f1 = kMissing;
    if (config.dev_eval_every > 0 && (epoch % config.dev_eval_every == 0 || epoch == config.epochs)) {
      objective.fill_dev_metrics(record);
    }
    history.records.push_back(record);
  }
  return history;
}

}  // namespace xlsent::detail

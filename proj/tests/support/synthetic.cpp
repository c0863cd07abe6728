#include "synthetic.hpp"

#include <algorithm>
#include <numeric>

namespace xlsent::testing {

std::string source_word(std::size_t id) { return "s" + std::to_string(id); }
std::string target_word(std::size_t id) { return "t" + std::to_string(id); }

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

Matrix random_orthogonal(std::size_t n, Rng& rng) { return orthonormal_factor(random_gaussian(n, n, rng)); }

namespace {

std::vector<LabeledSentence> sample_sentences(std::size_t count, std::size_t length,
                                              const std::vector<std::size_t>& positive,
                                              const std::vector<std::size_t>& negative, bool target_side, Rng& rng) {
  std::vector<std::size_t> polar(positive);
  polar.insert(polar.end(), negative.begin(), negative.end());
  std::vector<LabeledSentence> out;
  for (std::size_t s = 0; s < count; ++s) {
    LabeledSentence sentence;
    std::size_t positives = 0;
    for (std::size_t k = 0; k < length; ++k) {
      const std::size_t pick = rng.index(polar.size());
      if (pick < positive.size()) ++positives;
      const std::size_t id = polar[pick];
      sentence.tokens.push_back(target_side ? target_word(id) : source_word(id));
    }
    sentence.label = 2 * positives > length ? 1 : 0;
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace

RotationTask make_rotation_task(const RotationTaskOptions& options) {
  Rng rng(options.seed);
  const std::size_t v = options.vocabulary;
  const std::size_t d = options.dim;

  Matrix source = random_gaussian(v, d, rng);
  for (std::size_t i = 0; i < v; ++i) {
    auto row = source.row(i);
    const double len = norm(row);
    for (double& x : row) x /= len;
  }
  RotationTask task;
  task.rotation = random_orthogonal(d, rng);
  Matrix target = matmul(source, task.rotation);
  for (double& x : target.data()) x += options.noise * rng.normal();

  std::vector<std::string> src_words, trg_words;
  for (std::size_t i = 0; i < v; ++i) {
    src_words.push_back(source_word(i));
    trg_words.push_back(target_word(i));
  }
  task.source = EmbeddingSpace(src_words, source);
  task.target = EmbeddingSpace(trg_words, target);

  std::vector<std::size_t> ids(v);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::size_t> shuffled = ids;
  rng.shuffle(std::span(shuffled));
  task.lexicon_train.name = "synthetic.train";
  task.lexicon_dev.name = "synthetic.dev";
  for (std::size_t k = 0; k < options.train_pairs + options.dev_pairs && k < v; ++k) {
    const std::size_t id = shuffled[k];
    auto& lex = k < options.train_pairs ? task.lexicon_train : task.lexicon_dev;
    lex.pairs.push_back({source_word(id), target_word(id)});
    if (k >= options.train_pairs) task.dev_word_ids.push_back(id);
  }

  Vector direction(d);
  for (double& x : direction) x = rng.normal();
  std::vector<double> score(v);
  for (std::size_t i = 0; i < v; ++i) score[i] = dot(source.row(i), direction);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const std::vector<std::size_t> positive(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(options.polar_words));
  const std::vector<std::size_t> negative(ids.end() - static_cast<std::ptrdiff_t>(options.polar_words), ids.end());
  for (std::size_t id : positive) {
    task.positive_source.push_back(source_word(id));
    task.positive_target.push_back(target_word(id));
  }
  for (std::size_t id : negative) {
    task.negative_source.push_back(source_word(id));
    task.negative_target.push_back(target_word(id));
  }

  task.train_source =
      sample_sentences(options.train_sentences, options.sentence_length, positive, negative, false, rng);
  task.test_target = sample_sentences(options.test_sentences, options.sentence_length, positive, negative, true, rng);
  task.test_source = sample_sentences(options.test_sentences, options.sentence_length, positive, negative, false, rng);
  return task;
}

namespace {

std::vector<TargetedInstance> sample_targeted(std::size_t count, const RotationTask& base, bool target_side,
                                              double conflict_rate, const std::string& prefix, Rng& rng,
                                              std::vector<bool>* conflicting) {
  const auto& pos = target_side ? base.positive_target : base.positive_source;
  const auto& neg = target_side ? base.negative_target : base.negative_source;
  std::vector<TargetedInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = rng.bernoulli(0.5) ? 1 : 0;
    const bool conflict = rng.bernoulli(conflict_rate);
    const std::size_t context_polarity = conflict ? 1 - label : label;
    const auto& target_pool = label == 1 ? pos : neg;
    const auto& context_pool = context_polarity == 1 ? pos : neg;

    TargetedInstance inst;
    for (int k = 0; k < 2; ++k) inst.tokens.push_back(context_pool[rng.index(context_pool.size())]);
    inst.tokens.push_back(target_pool[rng.index(target_pool.size())]);
    for (int k = 0; k < 2; ++k) inst.tokens.push_back(context_pool[rng.index(context_pool.size())]);
    inst.target_start = 2;
    inst.target_end = 3;
    inst.label = label;
    inst.sentence_id = prefix + std::to_string(i);
    out.push_back(std::move(inst));
    if (conflicting) conflicting->push_back(conflict);
  }
  return out;
}

}  // namespace

TargetedTask make_targeted_task(double conflict_rate, const RotationTaskOptions& options) {
  TargetedTask task;
  task.base = make_rotation_task(options);
  Rng rng(mix_seed(options.seed, 99));
  task.train_source =
      sample_targeted(options.train_sentences, task.base, false, conflict_rate, "train-", rng, nullptr);
  task.test_target = sample_targeted(options.test_sentences, task.base, true, conflict_rate, "test-", rng,
                                     &task.test_conflicting);
  return task;
}

}  // namespace xlsent::testing

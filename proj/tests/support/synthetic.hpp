#pragma once

// Synthetic bilingual tasks with a known answer. The source space holds
// random unit vectors; the target space is the same words rotated by a
// random orthogonal matrix plus Gaussian noise, so a perfect cross-lingual
// map exists and is known.

#include <cstdint>
#include <string>
#include <vector>

#include "xlsent/corpus.hpp"
#include "xlsent/embeddings.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/linalg.hpp"
#include "xlsent/random.hpp"

namespace xlsent::testing {

struct RotationTaskOptions {
  std::size_t vocabulary = 200;
  std::size_t dim = 16;
  double noise = 0.01;
  std::size_t train_pairs = 150;
  std::size_t dev_pairs = 50;
  std::size_t polar_words = 20;  // per polarity
  std::size_t train_sentences = 400;
  std::size_t test_sentences = 100;
  std::size_t sentence_length = 5;
  std::uint64_t seed = 2024;
};

struct RotationTask {
  EmbeddingSpace source;
  EmbeddingSpace target;
  Matrix rotation;  // target ≈ source · rotation
  BilingualLexicon lexicon_train;
  BilingualLexicon lexicon_dev;
  std::vector<std::size_t> dev_word_ids;  // word ids of the dev pairs, lexicon order
  std::vector<std::string> positive_source, negative_source;
  std::vector<std::string> positive_target, negative_target;
  std::vector<LabeledSentence> train_source;  // labeled source-language sentences
  std::vector<LabeledSentence> test_target;   // held-out target-language sentences
  std::vector<LabeledSentence> test_source;   // held-out source-language sentences
};

std::string source_word(std::size_t id);
std::string target_word(std::size_t id);

// Random orthogonal matrix from the QR factor of a Gaussian matrix.
Matrix random_orthogonal(std::size_t n, Rng& rng);
Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

// Polar words are the vocabulary entries with the largest (positive) and
// smallest (negative) projection on a random direction; sentences draw
// tokens uniformly from the polar words and take the majority polarity.
RotationTask make_rotation_task(const RotationTaskOptions& options = {});

struct TargetedTask {
  RotationTask base;
  std::vector<TargetedInstance> train_source;
  std::vector<TargetedInstance> test_target;
  std::vector<bool> test_conflicting;  // context polarity differs from the target label
};

// Instances are "l l T r r": the target word carries the label, the four
// context words share one polarity that disagrees with the label in
// `conflict_rate` of the instances. Each instance is its own sentence.
TargetedTask make_targeted_task(double conflict_rate = 0.3, const RotationTaskOptions& options = {});

}  // namespace xlsent::testing

#pragma once

// Bilingual sentiment embeddings: two linear maps send source and target
// word vectors into one joint space, where a softmax head predicts
// sentiment. The maps are trained jointly on a translation lexicon
// (squared-distance alignment) and on source-language labeled sentences
// (cross-entropy); target sentences are classified by swapping in the
// target map at inference time.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "xlsent/corpus.hpp"
#include "xlsent/embeddings.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/linalg.hpp"

namespace xlsent {

enum class Side { source, target };

enum class SentenceVariant {
  blse,               // separate source and target projections plus a softmax head
  shared_projection,  // one projection used for both languages (no target map)
  no_projection,      // projections map straight to label logits; no head
};

enum class InitMode { uniform, identity };

struct BlseParams {
  SentenceVariant variant = SentenceVariant::blse;
  Matrix source_projection;  // d×h (d×o for no_projection)
  Matrix target_projection;  // d′×h (d′×o for no_projection; empty when shared)
  Matrix classifier;         // h×o (empty for no_projection)

  std::size_t joint_dim() const noexcept { return source_projection.cols(); }
  std::size_t label_count() const noexcept;
  const Matrix& projection(Side side) const;
};

// Entries uniform in ±1/√fan_in, deterministic under the seed. With
// InitMode::identity every square projection starts as the identity.
// For no_projection, h is ignored and both projections are d×o.
BlseParams init_params(std::size_t d, std::size_t dprime, std::size_t h, std::size_t o,
                       std::uint64_t seed, InitMode mode = InitMode::uniform,
                       SentenceVariant variant = SentenceVariant::blse);

// Averaged sentence embeddings, one row per sentence.
struct SentenceFeatures {
  Matrix averages;
  std::vector<std::size_t> labels;
  std::vector<bool> oov_only;

  std::size_t size() const noexcept { return labels.size(); }
  SentenceFeatures select(std::span<const std::size_t> rows) const;
};

SentenceFeatures featurize_sentences(const EmbeddingSpace& space, std::span<const LabeledSentence> sentences,
                                     OovPolicy policy = OovPolicy::skip);

// Stacked word vectors of the lexicon pairs found in both vocabularies.
struct PairFeatures {
  Matrix source;
  Matrix target;
  std::size_t skipped = 0;

  std::size_t size() const noexcept { return source.rows(); }
  PairFeatures select(std::span<const std::size_t> rows) const;
};

PairFeatures resolve_pairs(const EmbeddingSpace& source, const EmbeddingSpace& target,
                           const BilingualLexicon& lexicon);

Vector project(const BlseParams& params, std::span<const double> embedding, Side side);
inline Vector project_source(const BlseParams& p, std::span<const double> a) { return project(p, a, Side::source); }
inline Vector project_target(const BlseParams& p, std::span<const double> a) { return project(p, a, Side::target); }

// Mean squared Euclidean distance between projected pairs. The
// no_projection variant uses the mean (non-squared) distance instead.
double projection_loss(const BlseParams& params, const PairFeatures& pairs);

struct SentimentOutput {
  Vector probabilities;
  bool oov_only = false;  // no token was found; the distribution is uniform
};

SentimentOutput sentiment_forward(const BlseParams& params, const EmbeddingSpace& space,
                                  std::span<const std::string> tokens, Side side,
                                  OovPolicy policy = OovPolicy::skip);

// Probabilities for one averaged embedding.
Vector sentiment_probabilities(const BlseParams& params, std::span<const double> average, Side side);

// Mean negative log-likelihood of the gold labels.
double sentiment_loss(const BlseParams& params, const SentenceFeatures& batch, Side side = Side::source);
double sentiment_loss(const BlseParams& params, const EmbeddingSpace& space,
                      std::span<const LabeledSentence> batch, Side side = Side::source);

struct LossTerms {
  double joint = 0.0;
  double sentiment = 0.0;
  double projection = 0.0;
};

// J = α·H + (1−α)·MSE over one sentiment batch and one lexicon batch.
LossTerms joint_loss(const BlseParams& params, double alpha, const SentenceFeatures& batch,
                     const PairFeatures& pairs);

// Same shapes as the corresponding BlseParams matrices.
struct BlseGradients {
  Matrix source_projection;
  Matrix target_projection;
  Matrix classifier;
};

BlseGradients gradients(const BlseParams& params, double alpha, const SentenceFeatures& batch,
                        const PairFeatures& pairs);

struct TrainConfig {
  double alpha = 0.3;
  std::size_t epochs = 300;
  std::size_t batch_size = 20;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  std::size_t dev_eval_every = 1;
  std::size_t joint_dim = 0;  // 0 selects the source dimensionality
  InitMode init = InitMode::uniform;
  OovPolicy oov_policy = OovPolicy::skip;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double sentiment_loss = 0.0;
  double projection_loss = 0.0;
  double joint_loss = 0.0;
  // NaN when not evaluated this epoch or no dev data was given.
  double dev_pair_cosine = 0.0;
  double source_dev_f1 = 0.0;
  double target_dev_f1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> records;

  // Header: epoch,H,MSE,J,dev_pair_cosine,src_f1,tgt_f1. Missing values are empty fields.
  void write_csv(std::ostream& out) const;
};

struct SentenceTrainingData {
  const EmbeddingSpace& source_space;
  const EmbeddingSpace& target_space;
  std::span<const LabeledSentence> train;
  const BilingualLexicon& lexicon_train;
  const BilingualLexicon* lexicon_dev = nullptr;
  std::span<const LabeledSentence> source_dev = {};
  std::span<const LabeledSentence> target_dev = {};
  std::size_t label_count = 2;
};

struct TrainResult {
  BlseParams params;
  TrainHistory history;
};

// Per epoch: seeded shuffle of the sentiment data, then one ADAM step per
// sentiment batch paired round-robin with the next lexicon batch.
TrainResult train(const TrainConfig& config, const SentenceTrainingData& data);
// One projection for both languages.
TrainResult train_no_mprime(const TrainConfig& config, const SentenceTrainingData& data);
// Projections straight to label logits, aligned by non-squared distance.
TrainResult train_no_projection(const TrainConfig& config, const SentenceTrainingData& data);
TrainResult train_variant(const TrainConfig& config, const SentenceTrainingData& data, SentenceVariant variant);

std::size_t predict(const BlseParams& params, const EmbeddingSpace& space, std::span<const std::string> tokens,
                    Side side, OovPolicy policy = OovPolicy::skip);
std::vector<std::size_t> predict_all(const BlseParams& params, const SentenceFeatures& features, Side side);

// Mean cosine between projected source and projected target of each pair.
// Pairs whose projections have zero norm are skipped.
double mean_pair_cosine(const Matrix& source_projected, const Matrix& target_projected);
double dev_pair_cosine(const BlseParams& params, const PairFeatures& pairs);

std::string to_string(SentenceVariant variant);

}  // namespace xlsent

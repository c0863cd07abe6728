#pragma once

// Target-level classification on top of the bilingual projections. An
// instance is split into left context, target phrase and right context;
// each part is averaged, projected into the joint space and the three
// projections are concatenated for a softmax classifier.

#include <cstdint>
#include <span>
#include <vector>

#include "xlsent/blse.hpp"
#include "xlsent/corpus.hpp"

namespace xlsent {

enum class TargetedVariant {
  split,         // left, target and right all used
  target_only,   // both context thirds masked to zero
  context_only,  // one shared learned target representation for every instance
};

struct TargetedParams {
  TargetedVariant variant = TargetedVariant::split;
  Matrix source_projection;  // d×h
  Matrix target_projection;  // d′×h
  Matrix classifier;         // 3h×o over [left | target | right]
  Matrix shared_target;      // 1×d; context_only, projected through the source map

  std::size_t joint_dim() const noexcept { return source_projection.cols(); }
  std::size_t label_count() const noexcept { return classifier.cols(); }
  const Matrix& projection(Side side) const {
    return side == Side::source ? source_projection : target_projection;
  }
};

TargetedParams init_targeted(std::size_t d, std::size_t dprime, std::size_t h, std::size_t o,
                             std::uint64_t seed, TargetedVariant variant, InitMode mode = InitMode::uniform);

struct TargetedFeatures {
  Matrix left;
  Matrix target;
  Matrix right;
  std::vector<std::size_t> labels;
  std::vector<bool> oov_only;

  std::size_t size() const noexcept { return labels.size(); }
  TargetedFeatures select(std::span<const std::size_t> rows) const;
};

// Throws ArgumentError for sentence-level instances.
TargetedFeatures featurize_targeted(const EmbeddingSpace& space, std::span<const TargetedInstance> instances,
                                    OovPolicy policy = OovPolicy::skip);

// SPLIT forward pass, ignoring the variant masks.
Vector targeted_forward(const TargetedParams& params, const EmbeddingSpace& space,
                        const TargetedInstance& instance, Side side, OovPolicy policy = OovPolicy::skip);

// Forward pass honoring params.variant.
Vector variant_forward(const TargetedParams& params, const EmbeddingSpace& space,
                       const TargetedInstance& instance, Side side, OovPolicy policy = OovPolicy::skip);

std::size_t predict_targeted(const TargetedParams& params, const EmbeddingSpace& space,
                             const TargetedInstance& instance, Side side, OovPolicy policy = OovPolicy::skip);
std::vector<std::size_t> predict_targeted_all(const TargetedParams& params, const TargetedFeatures& features,
                                              Side side);

// Labels every target with the sentence-level prediction for its whole
// sentence. Every instance needs a sentence id.
std::vector<std::size_t> sent_baseline(const BlseParams& sentence_model, const EmbeddingSpace& space,
                                       std::span<const TargetedInstance> instances, Side side,
                                       OovPolicy policy = OovPolicy::skip);

LossTerms targeted_joint_loss(const TargetedParams& params, double alpha, const TargetedFeatures& batch,
                              const PairFeatures& pairs);

struct TargetedGradients {
  Matrix source_projection;
  Matrix target_projection;
  Matrix classifier;
  Matrix shared_target;
};

TargetedGradients targeted_gradients(const TargetedParams& params, double alpha, const TargetedFeatures& batch,
                                     const PairFeatures& pairs);

struct TargetedTrainingData {
  const EmbeddingSpace& source_space;
  const EmbeddingSpace& target_space;
  std::span<const TargetedInstance> train;
  const BilingualLexicon& lexicon_train;
  const BilingualLexicon* lexicon_dev = nullptr;
  std::span<const TargetedInstance> source_dev = {};
  std::span<const TargetedInstance> target_dev = {};
  std::size_t label_count = 2;
};

struct TargetedTrainResult {
  TargetedParams params;
  TrainHistory history;
};

TargetedTrainResult train_targeted(const TrainConfig& config, const TargetedTrainingData& data,
                                   TargetedVariant variant);

std::string to_string(TargetedVariant variant);

}  // namespace xlsent

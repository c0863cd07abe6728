#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xlsent/embeddings.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/linalg.hpp"

namespace xlsent {

// Supervised linear map from source to target embeddings.
struct MappingMatrix {
  Matrix weights;             // d×d′
  double fit_residual = 0.0;  // ‖S′W − T′‖_F² on the training pairs
  std::size_t skipped_pairs = 0;
};

struct MappingOptions {
  // Replace W by its nearest orthogonal matrix (square maps only).
  bool orthogonal = false;
};

// Least-squares fit over the lexicon pairs found in both vocabularies.
// Throws DegenerateSystemError with fewer resolvable pairs than dimensions.
MappingMatrix fit_mapping(const EmbeddingSpace& source, const EmbeddingSpace& target,
                          const BilingualLexicon& lexicon, const MappingOptions& options = {});

// Source vectors mapped into the target space, one row per input row.
Matrix apply_mapping(const MappingMatrix& mapping, const Matrix& source_vectors);

// Mean cosine between `query` and its k most similar candidate rows.
double mean_knn_cosine(std::span<const double> query, const Matrix& candidates, std::size_t k);

// 2·cos(Wx, y) − r_T(Wx) − r_S(y)
double csls_score(std::span<const double> mapped_query, std::span<const double> candidate,
                  double query_neighborhood, double candidate_neighborhood);

struct CslsIndex {
  std::size_t k = 10;
  Vector r_source;  // per query: mean cosine to its k nearest candidates
  Vector r_target;  // per candidate: mean cosine to its k nearest queries
};

CslsIndex build_csls_index(const Matrix& mapped_queries, const Matrix& candidates, std::size_t k = 10);

struct RetrievalHit {
  std::size_t candidate = 0;
  double score = 0.0;
};

// Candidates ranked by CSLS for every query, best first, ties by candidate
// index. `top_n` truncates each list (0 keeps all).
std::vector<std::vector<RetrievalHit>> csls_retrieve(const Matrix& mapped_queries, const Matrix& candidates,
                                                     std::size_t k = 10, std::size_t top_n = 0);

struct BaristaResult {
  std::vector<std::vector<std::string>> lines;
  std::size_t covered_tokens = 0;
  std::size_t replaced_tokens = 0;
};

// Concatenates both corpora and swaps each lexicon-covered token for one of
// its translations (either direction) with probability p.
BaristaResult barista_corpus(std::span<const std::vector<std::string>> source_lines,
                             std::span<const std::vector<std::string>> target_lines,
                             const BilingualLexicon& lexicon, double p = 0.5, std::uint64_t seed = 1);

struct LinearClassifierConfig {
  double l2 = 1e-4;
  std::size_t epochs = 500;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
};

// Multinomial logistic regression with an L2 penalty on the weights.
struct LinearClassifier {
  Matrix weights;  // d×o
  Vector bias;     // o
};

LinearClassifier linear_classifier_fit(const Matrix& features, std::span<const std::size_t> labels,
                                       std::size_t classes, const LinearClassifierConfig& config = {});
std::size_t linear_classifier_predict(const LinearClassifier& model, std::span<const double> feature);

}  // namespace xlsent

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xlsent/blse.hpp"
#include "xlsent/mapping.hpp"

namespace xlsent {

// Mean cosine between projected source and target vectors of every lexicon
// pair covered by both spaces. Throws ArgumentError if none is covered.
double pair_cosine(const BlseParams& params, const EmbeddingSpace& source, const EmbeddingSpace& target,
                   const BilingualLexicon& lexicon);
double pair_cosine(const MappingMatrix& mapping, const EmbeddingSpace& source, const EmbeddingSpace& target,
                   const BilingualLexicon& lexicon);

struct Separation {
  double within = 0.0;  // mean pairwise cosine inside each polarity set, pooled
  double cross = 0.0;   // mean cosine across the two sets
};

// Cosines are taken after projecting with `projection`.
Separation synonym_antonym_separation(const Matrix& projection, const EmbeddingSpace& space,
                                      std::span<const std::string> positive, std::span<const std::string> negative);
Separation synonym_antonym_separation(const BlseParams& params, const EmbeddingSpace& space,
                                      std::span<const std::string> positive, std::span<const std::string> negative,
                                      Side side);

struct NgramProfile {
  std::size_t n = 3;
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> probabilities;

  nlohmann::json to_json() const;
};

// Sliding-window n-grams over the symbols, each gram the symbols joined by
// `separator`. Throws ArgumentError for sequences shorter than n.
NgramProfile ngram_profile(std::span<const std::string> symbols, std::size_t n = 3, std::string_view separator = "");

// Code points of a UTF-8 string, one string each.
std::vector<std::string> utf8_characters(std::string_view text);

// Cosine between the concatenations [P_a ; C_a] and [P_b ; C_b] over the
// union of keys of each profile kind.
double language_similarity(const NgramProfile& pos_a, const NgramProfile& char_a, const NgramProfile& pos_b,
                           const NgramProfile& char_b);

// ½[KL(A‖B) + KL(B‖A)] in nats after adding `smoothing` to every count over
// the union of keys and normalizing.
double js_divergence(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
                     double smoothing = 1e-6);

// Keys present in every domain's `top_n` most frequent unigrams, ordered by
// total frequency (ties by key).
std::vector<std::string> common_top_vocabulary(std::span<const std::map<std::string, double>> domain_counts,
                                               std::size_t top_n = 10000);

std::map<std::string, double> restrict_counts(const std::map<std::string, double>& counts,
                                              std::span<const std::string> vocabulary);

// Sample Pearson correlation. Throws NumericDomainError on zero variance.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

// Writes the projected vectors of `tokens` in word2vec text format.
// Throws ArgumentError for tokens missing from the space.
void export_projected(const Matrix& projection, const EmbeddingSpace& space, std::span<const std::string> tokens,
                      std::ostream& out);

}  // namespace xlsent

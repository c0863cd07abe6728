#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xlsent/linalg.hpp"

namespace xlsent {

// Vocabulary plus one dense row per token. Immutable once built.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  // Throws ArgumentError on duplicate tokens or a row count that differs
  // from the vocabulary size.
  EmbeddingSpace(std::vector<std::string> words, Matrix vectors, bool normalized = false);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  bool is_normalized() const noexcept { return normalized_; }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  std::optional<std::size_t> index_of(std::string_view token) const;
  bool contains(std::string_view token) const { return index_of(token).has_value(); }
  std::span<const double> vector(std::size_t index) const { return vectors_.row(index); }

  // Number of duplicate tokens dropped by load_embeddings.
  std::size_t skipped_duplicates() const noexcept { return skipped_duplicates_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
  bool normalized_ = false;
  std::size_t skipped_duplicates_ = 0;

  friend EmbeddingSpace load_embeddings(std::istream&, std::optional<std::size_t>);
};

// Reads the word2vec text format: an optional "<v> <d>" header, then
// "<token> <f1> ... <fd>" per line. `limit` caps the number of rows kept.
// Throws FormatError naming the line on inconsistent dimensionality.
EmbeddingSpace load_embeddings(std::istream& in, std::optional<std::size_t> limit = std::nullopt);

// Writes the word2vec text format with a header line and %.6f values.
void save_embeddings(const EmbeddingSpace& space, std::ostream& out);

enum class OovPolicy {
  skip,  // unknown tokens are ignored
  zero,  // unknown tokens count as zero vectors
};

// Mean embedding of the tokens. An empty effective set yields the zero vector.
Vector average(const EmbeddingSpace& space, std::span<const std::string> tokens,
               OovPolicy policy = OovPolicy::skip);

std::size_t count_known(const EmbeddingSpace& space, std::span<const std::string> tokens);

// Scales every nonzero row to unit length; zero rows stay zero.
EmbeddingSpace normalize_rows(const EmbeddingSpace& space);

// ASCII lowercasing, leaving multi-byte sequences untouched.
std::string ascii_lower(std::string_view s);

}  // namespace xlsent

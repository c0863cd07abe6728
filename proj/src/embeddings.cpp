#include "xlsent/embeddings.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>

#include "xlsent/errors.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> words, Matrix vectors, bool normalized)
    : words_(std::move(words)), vectors_(std::move(vectors)), normalized_(normalized) {
  if (words_.size() != vectors_.rows()) {
    throw ArgumentError("EmbeddingSpace: " + std::to_string(words_.size()) + " tokens but " +
                        std::to_string(vectors_.rows()) + " rows");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw ArgumentError("EmbeddingSpace: duplicate token '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingSpace::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingSpace load_embeddings(std::istream& in, std::optional<std::size_t> limit) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::optional<std::size_t> dim;
  std::size_t skipped = 0;
  std::unordered_map<std::string, std::size_t> seen;

  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;

    if (first_content) {
      first_content = false;
      if (fields.size() == 2) {
        const auto count = parse_size(fields[0]);
        const auto width = parse_size(fields[1]);
        if (count && width) {
          if (*width == 0) throw FormatError(line_no, "header declares zero dimensions");
          dim = *width;
          continue;
        }
      }
    }
    if (limit && words.size() >= *limit) break;

    if (fields.size() < 2) throw FormatError(line_no, "expected a token followed by values");
    const std::size_t width = fields.size() - 1;
    if (!dim) dim = width;
    if (width != *dim) {
      throw FormatError(line_no, "expected " + std::to_string(*dim) + " values, found " +
                                     std::to_string(width));
    }

    std::string token(fields[0]);
    if (seen.contains(token)) {
      ++skipped;
      continue;
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto value = parse_double(fields[k]);
      if (!value) {
        throw FormatError(line_no, "invalid number '" + std::string(fields[k]) + "'");
      }
      values.push_back(*value);
    }
    seen.emplace(token, words.size());
    words.push_back(std::move(token));
  }

  if (words.empty() && !dim) {
    throw FormatError("load_embeddings: no embedding rows found");
  }

  const std::size_t rows = words.size();
  EmbeddingSpace space(std::move(words), Matrix(rows, dim.value_or(0), std::move(values)));
  space.skipped_duplicates_ = skipped;
  return space;
}

void save_embeddings(const EmbeddingSpace& space, std::ostream& out) {
  out << space.size() << ' ' << space.dim() << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.words()[i];
    for (double x : space.vector(i)) out << ' ' << format_fixed(x, 6);
    out << '\n';
  }
}

Vector average(const EmbeddingSpace& space, std::span<const std::string> tokens, OovPolicy policy) {
  Vector sum(space.dim(), 0.0);
  std::size_t divisor = 0;
  for (const auto& token : tokens) {
    if (auto idx = space.index_of(token)) {
      auto row = space.vector(*idx);
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
      ++divisor;
    } else if (policy == OovPolicy::zero) {
      ++divisor;
    }
  }
  if (divisor > 0) {
    for (double& x : sum) x /= static_cast<double>(divisor);
  }
  return sum;
}

std::size_t count_known(const EmbeddingSpace& space, std::span<const std::string> tokens) {
  std::size_t known = 0;
  for (const auto& token : tokens)
    if (space.contains(token)) ++known;
  return known;
}

EmbeddingSpace normalize_rows(const EmbeddingSpace& space) {
  Matrix vectors = space.vectors();
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    auto row = vectors.row(i);
    const double len = norm(row);
    if (len == 0.0) continue;
    for (double& x : row) x /= len;
  }
  return EmbeddingSpace(space.words(), std::move(vectors), true);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace xlsent

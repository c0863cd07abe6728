#include "xlsent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <unordered_map>

#include "xlsent/errors.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

double pair_cosine(const BlseParams& params, const EmbeddingSpace& source, const EmbeddingSpace& target,
                   const BilingualLexicon& lexicon) {
  const PairFeatures pairs = resolve_pairs(source, target, lexicon);
  if (pairs.size() == 0) throw ArgumentError("pair_cosine: no lexicon pair is covered by both spaces");
  return dev_pair_cosine(params, pairs);
}

double pair_cosine(const MappingMatrix& mapping, const EmbeddingSpace& source, const EmbeddingSpace& target,
                   const BilingualLexicon& lexicon) {
  const PairFeatures pairs = resolve_pairs(source, target, lexicon);
  if (pairs.size() == 0) throw ArgumentError("pair_cosine: no lexicon pair is covered by both spaces");
  return mean_pair_cosine(apply_mapping(mapping, pairs.source), pairs.target);
}

namespace {

Matrix project_words(const Matrix& projection, const EmbeddingSpace& space, std::span<const std::string> words,
                     const char* what) {
  if (space.dim() != projection.rows()) throw SizeError(std::string(what) + ": projection does not match space");
  Matrix out(words.size(), projection.cols());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto idx = space.index_of(words[i]);
    if (!idx) throw ArgumentError(std::string(what) + ": '" + words[i] + "' is not in the vocabulary");
    const Vector z = vecmat(space.vector(*idx), projection);
    std::copy(z.begin(), z.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

Separation synonym_antonym_separation(const Matrix& projection, const EmbeddingSpace& space,
                                      std::span<const std::string> positive, std::span<const std::string> negative) {
  if (positive.empty() || negative.empty()) throw ArgumentError("synonym_antonym_separation: empty word set");
  const Matrix pos = project_words(projection, space, positive, "synonym_antonym_separation");
  const Matrix neg = project_words(projection, space, negative, "synonym_antonym_separation");

  double within = 0.0;
  std::size_t within_pairs = 0;
  for (const Matrix* set : {&pos, &neg}) {
    for (std::size_t i = 0; i < set->rows(); ++i) {
      for (std::size_t j = i + 1; j < set->rows(); ++j) {
        within += cosine(set->row(i), set->row(j));
        ++within_pairs;
      }
    }
  }
  if (within_pairs == 0) throw ArgumentError("synonym_antonym_separation: need two words in at least one set");

  double cross = 0.0;
  for (std::size_t i = 0; i < pos.rows(); ++i)
    for (std::size_t j = 0; j < neg.rows(); ++j) cross += cosine(pos.row(i), neg.row(j));

  return {within / static_cast<double>(within_pairs), cross / static_cast<double>(pos.rows() * neg.rows())};
}

Separation synonym_antonym_separation(const BlseParams& params, const EmbeddingSpace& space,
                                      std::span<const std::string> positive, std::span<const std::string> negative,
                                      Side side) {
  return synonym_antonym_separation(params.projection(side), space, positive, negative);
}

nlohmann::json NgramProfile::to_json() const {
  return {{"n", n}, {"counts", counts}, {"probabilities", probabilities}};
}

NgramProfile ngram_profile(std::span<const std::string> symbols, std::size_t n, std::string_view separator) {
  if (n == 0) throw ArgumentError("ngram_profile: n must be >= 1");
  if (symbols.size() < n) {
    throw ArgumentError("ngram_profile: sequence of length " + std::to_string(symbols.size()) + " is shorter than n=" +
                        std::to_string(n));
  }
  NgramProfile profile;
  profile.n = n;
  const std::size_t windows = symbols.size() - n + 1;
  for (std::size_t i = 0; i < windows; ++i) {
    std::string gram = symbols[i];
    for (std::size_t k = 1; k < n; ++k) {
      gram += separator;
      gram += symbols[i + k];
    }
    ++profile.counts[gram];
  }
  for (const auto& [gram, count] : profile.counts) {
    profile.probabilities[gram] = static_cast<double>(count) / static_cast<double>(windows);
  }
  return profile;
}

std::vector<std::string> utf8_characters(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

struct DotNorms {
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
};

void accumulate(const std::map<std::string, double>& a, const std::map<std::string, double>& b, DotNorms& acc) {
  for (const auto& [key, pa] : a) {
    acc.norm_a += pa * pa;
    if (auto it = b.find(key); it != b.end()) acc.dot += pa * it->second;
  }
  for (const auto& [key, pb] : b) acc.norm_b += pb * pb;
}

}  // namespace

double language_similarity(const NgramProfile& pos_a, const NgramProfile& char_a, const NgramProfile& pos_b,
                           const NgramProfile& char_b) {
  for (const NgramProfile* p : {&pos_a, &char_a, &pos_b, &char_b}) {
    if (p->probabilities.empty()) throw ArgumentError("language_similarity: empty profile");
  }
  DotNorms acc;
  accumulate(pos_a.probabilities, pos_b.probabilities, acc);
  accumulate(char_a.probabilities, char_b.probabilities, acc);
  return std::clamp(acc.dot / std::sqrt(acc.norm_a * acc.norm_b), 0.0, 1.0);
}

double js_divergence(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
                     double smoothing) {
  if (a.empty() || b.empty()) throw ArgumentError("js_divergence: empty distribution");
  if (!(smoothing > 0.0)) throw ArgumentError("js_divergence: smoothing must be positive");

  std::set<std::string> keys;
  for (const auto& [k, v] : a) {
    if (v < 0.0) throw ArgumentError("js_divergence: negative count");
    keys.insert(k);
  }
  for (const auto& [k, v] : b) {
    if (v < 0.0) throw ArgumentError("js_divergence: negative count");
    keys.insert(k);
  }

  auto lookup = [](const std::map<std::string, double>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };
  double total_a = 0.0, total_b = 0.0;
  for (const auto& k : keys) {
    total_a += lookup(a, k) + smoothing;
    total_b += lookup(b, k) + smoothing;
  }
  double kl_ab = 0.0, kl_ba = 0.0;
  for (const auto& k : keys) {
    const double pa = (lookup(a, k) + smoothing) / total_a;
    const double pb = (lookup(b, k) + smoothing) / total_b;
    kl_ab += pa * std::log(pa / pb);
    kl_ba += pb * std::log(pb / pa);
  }
  return std::max(0.0, 0.5 * (kl_ab + kl_ba));
}

std::vector<std::string> common_top_vocabulary(std::span<const std::map<std::string, double>> domain_counts,
                                               std::size_t top_n) {
  if (domain_counts.empty()) return {};
  std::unordered_map<std::string, std::size_t> membership;
  std::unordered_map<std::string, double> totals;
  for (const auto& counts : domain_counts) {
    std::vector<std::pair<std::string, double>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    if (ranked.size() > top_n) ranked.resize(top_n);
    for (const auto& [word, count] : ranked) {
      ++membership[word];
      totals[word] += count;
    }
  }
  std::vector<std::string> out;
  for (const auto& [word, seen] : membership)
    if (seen == domain_counts.size()) out.push_back(word);
  std::sort(out.begin(), out.end(), [&](const std::string& x, const std::string& y) {
    return totals[x] != totals[y] ? totals[x] > totals[y] : x < y;
  });
  return out;
}

std::map<std::string, double> restrict_counts(const std::map<std::string, double>& counts,
                                              std::span<const std::string> vocabulary) {
  std::map<std::string, double> out;
  for (const auto& word : vocabulary) {
    auto it = counts.find(word);
    out[word] = it == counts.end() ? 0.0 : it->second;
  }
  return out;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw SizeError("pearson_r: length mismatch");
  if (xs.size() < 2) throw ArgumentError("pearson_r: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericDomainError("pearson_r: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void export_projected(const Matrix& projection, const EmbeddingSpace& space, std::span<const std::string> tokens,
                      std::ostream& out) {
  const Matrix projected = project_words(projection, space, tokens, "export_projected");
  out << tokens.size() << ' ' << projection.cols() << '\n';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    for (double x : projected.row(i)) out << ' ' << format_fixed(x, 6);
    out << '\n';
  }
}

}  // namespace xlsent

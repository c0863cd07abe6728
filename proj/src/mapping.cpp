#include "xlsent/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "model_ops.hpp"
#include "xlsent/blse.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/random.hpp"

namespace xlsent {

MappingMatrix fit_mapping(const EmbeddingSpace& source, const EmbeddingSpace& target,
                          const BilingualLexicon& lexicon, const MappingOptions& options) {
  const PairFeatures pairs = resolve_pairs(source, target, lexicon);
  if (pairs.size() < source.dim()) {
    throw DegenerateSystemError("fit_mapping: " + std::to_string(pairs.size()) + " resolvable pairs for " +
                                std::to_string(source.dim()) + " source dimensions");
  }

  MappingMatrix out;
  out.skipped_pairs = pairs.skipped;
  out.weights = least_squares_solve(pairs.source, pairs.target);
  if (options.orthogonal) out.weights = nearest_orthogonal(out.weights);
  const Matrix residual = matmul(pairs.source, out.weights) - pairs.target;
  out.fit_residual = dot(residual.data(), residual.data());
  return out;
}

Matrix apply_mapping(const MappingMatrix& mapping, const Matrix& source_vectors) {
  return matmul(source_vectors, mapping.weights);
}

double mean_knn_cosine(std::span<const double> query, const Matrix& candidates, std::size_t k) {
  if (candidates.rows() == 0) throw ArgumentError("mean_knn_cosine: no candidates");
  if (k == 0 || k > candidates.rows()) {
    throw ArgumentError("mean_knn_cosine: k=" + std::to_string(k) + " with " + std::to_string(candidates.rows()) +
                        " candidates");
  }
  Vector sims(candidates.rows());
  for (std::size_t i = 0; i < candidates.rows(); ++i) sims[i] = cosine(query, candidates.row(i));
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(), std::greater<>());
  return std::accumulate(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k);
}

double csls_score(std::span<const double> mapped_query, std::span<const double> candidate,
                  double query_neighborhood, double candidate_neighborhood) {
  if (!std::isfinite(query_neighborhood) || !std::isfinite(candidate_neighborhood)) {
    throw NumericDomainError("csls_score: non-finite neighborhood term");
  }
  return 2.0 * cosine(mapped_query, candidate) - query_neighborhood - candidate_neighborhood;
}

namespace {

Matrix unit_rows(const Matrix& m, const char* what) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    const double len = norm(row);
    if (len == 0.0) throw NumericDomainError(std::string(what) + ": zero-norm row " + std::to_string(i));
    for (double& x : row) x /= len;
  }
  return out;
}

double mean_top_k(Vector values, std::size_t k) {
  std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(), std::greater<>());
  return std::accumulate(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
         static_cast<double>(k);
}

Matrix cosine_matrix(const Matrix& queries, const Matrix& candidates) {
  if (queries.cols() != candidates.cols()) throw SizeError("csls: query and candidate dimensions differ");
  return matmul(unit_rows(queries, "csls queries"), unit_rows(candidates, "csls candidates").transposed());
}

CslsIndex index_from_sims(const Matrix& sims, std::size_t k) {
  if (k == 0 || k > sims.cols() || k > sims.rows()) {
    throw ArgumentError("csls: k=" + std::to_string(k) + " exceeds the number of queries or candidates");
  }
  CslsIndex index;
  index.k = k;
  index.r_source.resize(sims.rows());
  index.r_target.resize(sims.cols());
  for (std::size_t i = 0; i < sims.rows(); ++i) {
    auto row = sims.row(i);
    index.r_source[i] = mean_top_k(Vector(row.begin(), row.end()), k);
  }
  Vector column(sims.rows());
  for (std::size_t j = 0; j < sims.cols(); ++j) {
    for (std::size_t i = 0; i < sims.rows(); ++i) column[i] = sims(i, j);
    index.r_target[j] = mean_top_k(column, k);
  }
  return index;
}

}  // namespace

CslsIndex build_csls_index(const Matrix& mapped_queries, const Matrix& candidates, std::size_t k) {
  return index_from_sims(cosine_matrix(mapped_queries, candidates), k);
}

std::vector<std::vector<RetrievalHit>> csls_retrieve(const Matrix& mapped_queries, const Matrix& candidates,
                                                     std::size_t k, std::size_t top_n) {
  const Matrix sims = cosine_matrix(mapped_queries, candidates);
  const CslsIndex index = index_from_sims(sims, k);
  const std::size_t keep = top_n == 0 ? candidates.rows() : std::min(top_n, candidates.rows());

  std::vector<std::vector<RetrievalHit>> out(mapped_queries.rows());
  for (std::size_t i = 0; i < mapped_queries.rows(); ++i) {
    std::vector<RetrievalHit> hits(candidates.rows());
    for (std::size_t j = 0; j < candidates.rows(); ++j) {
      hits[j] = {j, 2.0 * sims(i, j) - index.r_source[i] - index.r_target[j]};
    }
    auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
      return a.score != b.score ? a.score > b.score : a.candidate < b.candidate;
    };
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
    hits.resize(keep);
    out[i] = std::move(hits);
  }
  return out;
}

BaristaResult barista_corpus(std::span<const std::vector<std::string>> source_lines,
                             std::span<const std::vector<std::string>> target_lines,
                             const BilingualLexicon& lexicon, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("barista_corpus: p must lie in [0, 1]");

  std::unordered_map<std::string, std::vector<std::string>> translations;
  auto add = [&](const std::string& from, const std::string& to) {
    auto& options = translations[from];
    if (std::find(options.begin(), options.end(), to) == options.end()) options.push_back(to);
  };
  for (const auto& pair : lexicon.pairs) add(pair.source, pair.target);
  for (const auto& pair : lexicon.pairs) add(pair.target, pair.source);

  BaristaResult out;
  out.lines.reserve(source_lines.size() + target_lines.size());
  Rng rng(seed);
  auto emit = [&](const std::vector<std::string>& line) {
    std::vector<std::string> mixed;
    mixed.reserve(line.size());
    for (const auto& token : line) {
      auto it = translations.find(token);
      if (it == translations.end()) {
        mixed.push_back(token);
        continue;
      }
      ++out.covered_tokens;
      if (rng.bernoulli(p)) {
        ++out.replaced_tokens;
        const auto& options = it->second;
        mixed.push_back(options.size() == 1 ? options.front() : options[rng.index(options.size())]);
      } else {
        mixed.push_back(token);
      }
    }
    out.lines.push_back(std::move(mixed));
  };
  for (const auto& line : source_lines) emit(line);
  for (const auto& line : target_lines) emit(line);
  return out;
}

LinearClassifier linear_classifier_fit(const Matrix& features, std::span<const std::size_t> labels,
                                       std::size_t classes, const LinearClassifierConfig& config) {
  if (features.rows() != labels.size()) throw SizeError("linear_classifier_fit: label count differs from rows");
  if (classes < 2) throw ArgumentError("linear_classifier_fit: need at least two classes");
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t y : labels) {
    if (y >= classes) throw ArgumentError("linear_classifier_fit: label outside the label space");
    ++counts[y];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) {
      throw ArgumentError("linear_classifier_fit: class " + std::to_string(c) + " has no training examples");
    }
  }

  const std::size_t d = features.cols();
  Rng rng(config.seed);
  LinearClassifier model{Matrix(d, classes), Vector(classes, 0.0)};
  for (double& x : model.weights.data()) x = rng.uniform(-0.01, 0.01);
  Matrix bias = Matrix::row_vector(model.bias);

  AdamState weight_state(d, classes, config.learning_rate);
  AdamState bias_state(1, classes, config.learning_rate);
  Matrix dlogits;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Matrix logits = matmul(features, model.weights);
    for (std::size_t i = 0; i < logits.rows(); ++i)
      for (std::size_t c = 0; c < classes; ++c) logits(i, c) += bias(0, c);
    detail::softmax_cross_entropy(logits, labels, &dlogits);

    Matrix grad_w = matmul_at_b(features, dlogits);
    grad_w += config.l2 * model.weights;
    Matrix grad_b(1, classes);
    for (std::size_t i = 0; i < dlogits.rows(); ++i)
      for (std::size_t c = 0; c < classes; ++c) grad_b(0, c) += dlogits(i, c);

    adam_step(model.weights, grad_w, weight_state);
    adam_step(bias, grad_b, bias_state);
  }
  auto b = bias.row(0);
  model.bias.assign(b.begin(), b.end());
  return model;
}

std::size_t linear_classifier_predict(const LinearClassifier& model, std::span<const double> feature) {
  Vector logits = vecmat(feature, model.weights);
  for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += model.bias[c];
  return argmax(logits);
}

}  // namespace xlsent

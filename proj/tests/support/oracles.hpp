#pragma once

// Slow, independent reference computations used as test oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "xlsent/linalg.hpp"

namespace xlsent::testing {

// Macro F1 straight from the definitions, counting per class.
inline double naive_macro_f1(std::span<const std::size_t> gold, std::span<const std::size_t> pred,
                             std::size_t classes) {
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c && gold[i] == c) tp += 1;
      if (pred[i] == c && gold[i] != c) fp += 1;
      if (pred[i] != c && gold[i] == c) fn += 1;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    total += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return total / static_cast<double>(classes);
}

// Fraction of all 2^n swap patterns whose |ΔF1| reaches the observed one.
inline double exhaustive_randomization(std::span<const std::size_t> gold, std::span<const std::size_t> a,
                                       std::span<const std::size_t> b, std::size_t classes) {
  const std::size_t n = gold.size();
  const double observed = std::abs(naive_macro_f1(gold, a, classes) - naive_macro_f1(gold, b, classes));
  std::vector<std::size_t> x(n), y(n);
  std::size_t hits = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool swap = (mask >> i) & 1u;
      x[i] = swap ? b[i] : a[i];
      y[i] = swap ? a[i] : b[i];
    }
    const double s = std::abs(naive_macro_f1(gold, x, classes) - naive_macro_f1(gold, y, classes));
    if (s >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

inline double naive_cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// CSLS ranking by enumerating every query/candidate pair. Neighborhood
// means use a full sort of all cosines.
inline std::vector<std::vector<std::size_t>> brute_force_csls(const Matrix& queries, const Matrix& candidates,
                                                              std::size_t k) {
  const std::size_t nq = queries.rows(), nc = candidates.rows();
  std::vector<std::vector<double>> cos(nq, std::vector<double>(nc));
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < nc; ++j) cos[i][j] = naive_cosine(queries.row(i), candidates.row(j));
  auto top_mean = [k](std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k);
  };
  std::vector<double> r_query(nq), r_candidate(nc);
  for (std::size_t i = 0; i < nq; ++i) r_query[i] = top_mean(cos[i]);
  for (std::size_t j = 0; j < nc; ++j) {
    std::vector<double> column(nq);
    for (std::size_t i = 0; i < nq; ++i) column[i] = cos[i][j];
    r_candidate[j] = top_mean(column);
  }
  std::vector<std::vector<std::size_t>> ranking(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    std::vector<double> score(nc);
    for (std::size_t j = 0; j < nc; ++j) score[j] = 2 * cos[i][j] - r_query[i] - r_candidate[j];
    ranking[i].resize(nc);
    std::iota(ranking[i].begin(), ranking[i].end(), 0);
    std::stable_sort(ranking[i].begin(), ranking[i].end(),
                     [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
  }
  return ranking;
}

}  // namespace xlsent::testing

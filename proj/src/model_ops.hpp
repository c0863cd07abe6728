#pragma once

// Loss kernels shared by the sentence-level and targeted models.

#include <cmath>
#include <span>
#include <string>

#include "xlsent/errors.hpp"
#include "xlsent/linalg.hpp"

namespace xlsent::detail {

// Mean categorical NLL of `labels` under row-wise softmax(logits). When
// `dlogits` is given it receives (softmax − onehot) / rows.
inline double softmax_cross_entropy(const Matrix& logits, std::span<const std::size_t> labels,
                                    Matrix* dlogits) {
  const std::size_t rows = logits.rows();
  if (rows == 0) throw ArgumentError("sentiment loss: empty batch");
  if (labels.size() != rows) throw SizeError("sentiment loss: label count differs from batch size");
  if (dlogits) *dlogits = Matrix(rows, logits.cols());
  const double inv_rows = 1.0 / static_cast<double>(rows);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    auto row = logits.row(i);
    if (labels[i] >= row.size()) {
      throw ArgumentError("sentiment loss: label " + std::to_string(labels[i]) + " outside " +
                          std::to_string(row.size()) + " classes");
    }
    double peak = row[0];
    for (double x : row) peak = std::max(peak, x);
    double partition = 0.0;
    for (double x : row) partition += std::exp(x - peak);
    const double log_partition = peak + std::log(partition);
    total += log_partition - row[labels[i]];
    if (dlogits) {
      auto grad = dlogits->row(i);
      for (std::size_t c = 0; c < row.size(); ++c) grad[c] = std::exp(row[c] - log_partition) * inv_rows;
      grad[labels[i]] -= inv_rows;
    }
  }
  return total * inv_rows;
}

// Alignment penalty between two projected pair sets (rows are pairs).
// Squared: mean ‖diff‖²; otherwise mean ‖diff‖ with a zero subgradient at
// coincident projections. `ddiff` receives ∂penalty/∂(source − target).
inline double alignment_penalty(const Matrix& source_projected, const Matrix& target_projected,
                                bool squared, Matrix* ddiff) {
  if (!source_projected.same_shape(target_projected)) throw SizeError("alignment: projected shapes differ");
  const std::size_t n = source_projected.rows();
  if (n == 0) throw ArgumentError("projection loss: empty pair list");
  if (ddiff) *ddiff = Matrix(n, source_projected.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto zs = source_projected.row(i);
    auto zt = target_projected.row(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < zs.size(); ++j) sq += (zs[j] - zt[j]) * (zs[j] - zt[j]);
    if (squared) {
      total += sq;
      if (ddiff) {
        auto g = ddiff->row(i);
        for (std::size_t j = 0; j < zs.size(); ++j) g[j] = 2.0 * (zs[j] - zt[j]) * inv_n;
      }
    } else {
      const double dist = std::sqrt(sq);
      total += dist;
      if (ddiff && dist > 0.0) {
        auto g = ddiff->row(i);
        for (std::size_t j = 0; j < zs.size(); ++j) g[j] = (zs[j] - zt[j]) / dist * inv_n;
      }
    }
  }
  return total * inv_n;
}

}  // namespace xlsent::detail

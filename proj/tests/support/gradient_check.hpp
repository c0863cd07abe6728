#pragma once

// Finite-difference checks of the analytic model gradients at random
// parameter points.

#include <cstdint>

#include "xlsent/blse.hpp"
#include "xlsent/random.hpp"
#include "xlsent/targeted.hpp"

namespace xlsent::testing {

struct GradientCheckOptions {
  std::size_t d = 8;
  std::size_t dprime = 8;
  std::size_t h = 8;
  std::size_t o = 3;
  std::size_t batch = 6;
  std::size_t pairs = 7;
  double step = 1e-5;
};

// ‖a − n‖_F / max(‖a‖_F, ‖n‖_F); 0 when both vanish.
double relative_error(const Matrix& analytic, const Matrix& numeric);

// Largest relative error over all trainable matrices of one random
// configuration (random α in [0.1, 0.9], random inputs).
double sentence_gradient_error(SentenceVariant variant, std::uint64_t seed, const GradientCheckOptions& options = {});
double targeted_gradient_error(TargetedVariant variant, std::uint64_t seed, const GradientCheckOptions& options = {});

SentenceFeatures random_sentence_batch(std::size_t rows, std::size_t dim, std::size_t classes, Rng& rng);
PairFeatures random_pairs(std::size_t rows, std::size_t d, std::size_t dprime, Rng& rng);
// Some context rows are zero, as for targets at a sentence boundary.
TargetedFeatures random_targeted_batch(std::size_t rows, std::size_t dim, std::size_t classes, Rng& rng);

}  // namespace xlsent::testing

#include "gradient_check.hpp"

#include <algorithm>

#include "synthetic.hpp"

namespace xlsent::testing {

double relative_error(const Matrix& analytic, const Matrix& numeric) {
  const double scale = std::max(frobenius_norm(analytic), frobenius_norm(numeric));
  if (scale == 0.0) return 0.0;
  return frobenius_norm(analytic - numeric) / scale;
}

SentenceFeatures random_sentence_batch(std::size_t rows, std::size_t dim, std::size_t classes, Rng& rng) {
  SentenceFeatures f;
  f.averages = random_gaussian(rows, dim, rng);
  for (std::size_t i = 0; i < rows; ++i) {
    f.labels.push_back(rng.index(classes));
    f.oov_only.push_back(false);
  }
  return f;
}

PairFeatures random_pairs(std::size_t rows, std::size_t d, std::size_t dprime, Rng& rng) {
  return {random_gaussian(rows, d, rng), random_gaussian(rows, dprime, rng), 0};
}

TargetedFeatures random_targeted_batch(std::size_t rows, std::size_t dim, std::size_t classes, Rng& rng) {
  TargetedFeatures f;
  f.left = random_gaussian(rows, dim, rng);
  f.target = random_gaussian(rows, dim, rng);
  f.right = random_gaussian(rows, dim, rng);
  for (std::size_t i = 0; i < rows; ++i) {
    if (rng.bernoulli(0.25)) std::fill(f.left.row(i).begin(), f.left.row(i).end(), 0.0);
    if (rng.bernoulli(0.25)) std::fill(f.right.row(i).begin(), f.right.row(i).end(), 0.0);
    f.labels.push_back(rng.index(classes));
    f.oov_only.push_back(false);
  }
  return f;
}

namespace {

Matrix randomized(const Matrix& like, Rng& rng) {
  Matrix m(like.rows(), like.cols());
  for (double& x : m.data()) x = 0.5 * rng.normal();
  return m;
}

}  // namespace

double sentence_gradient_error(SentenceVariant variant, std::uint64_t seed, const GradientCheckOptions& o) {
  Rng rng(seed);
  const std::size_t dprime = variant == SentenceVariant::shared_projection ? o.d : o.dprime;
  BlseParams params = init_params(o.d, dprime, o.h, o.o, seed, InitMode::uniform, variant);
  params.source_projection = randomized(params.source_projection, rng);
  if (!params.target_projection.empty()) params.target_projection = randomized(params.target_projection, rng);
  if (!params.classifier.empty()) params.classifier = randomized(params.classifier, rng);
  const double alpha = rng.uniform(0.1, 0.9);
  const SentenceFeatures batch = random_sentence_batch(o.batch, o.d, o.o, rng);
  const PairFeatures pairs = random_pairs(o.pairs, o.d, dprime, rng);

  const BlseGradients g = gradients(params, alpha, batch, pairs);
  double worst = 0.0;
  auto check = [&](Matrix BlseParams::*member, const Matrix& analytic) {
    const auto loss = [&](const Matrix& x) {
      BlseParams q = params;
      q.*member = x;
      return joint_loss(q, alpha, batch, pairs).joint;
    };
    worst = std::max(worst, relative_error(analytic, finite_difference_gradient(loss, params.*member, o.step)));
  };
  check(&BlseParams::source_projection, g.source_projection);
  if (!params.target_projection.empty()) check(&BlseParams::target_projection, g.target_projection);
  if (!params.classifier.empty()) check(&BlseParams::classifier, g.classifier);
  return worst;
}

double targeted_gradient_error(TargetedVariant variant, std::uint64_t seed, const GradientCheckOptions& o) {
  Rng rng(seed);
  TargetedParams params = init_targeted(o.d, o.dprime, o.h, o.o, seed, variant);
  params.source_projection = randomized(params.source_projection, rng);
  params.target_projection = randomized(params.target_projection, rng);
  params.classifier = randomized(params.classifier, rng);
  params.shared_target = randomized(params.shared_target, rng);
  const double alpha = rng.uniform(0.1, 0.9);
  const TargetedFeatures batch = random_targeted_batch(o.batch, o.d, o.o, rng);
  const PairFeatures pairs = random_pairs(o.pairs, o.d, o.dprime, rng);

  const TargetedGradients g = targeted_gradients(params, alpha, batch, pairs);
  double worst = 0.0;
  auto check = [&](Matrix TargetedParams::*member, const Matrix& analytic) {
    const auto loss = [&](const Matrix& x) {
      TargetedParams q = params;
      q.*member = x;
      return targeted_joint_loss(q, alpha, batch, pairs).joint;
    };
    worst = std::max(worst, relative_error(analytic, finite_difference_gradient(loss, params.*member, o.step)));
  };
  check(&TargetedParams::source_projection, g.source_projection);
  check(&TargetedParams::target_projection, g.target_projection);
  check(&TargetedParams::classifier, g.classifier);
  if (variant == TargetedVariant::context_only) check(&TargetedParams::shared_target, g.shared_target);
  return worst;
}

}  // namespace xlsent::testing

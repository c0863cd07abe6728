#include "xlsent/targeted.hpp"

#include <cmath>
#include <map>

#include "model_ops.hpp"
#include "training_loop.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/eval.hpp"
#include "xlsent/random.hpp"

namespace xlsent {

std::string to_string(TargetedVariant variant) {
  switch (variant) {
    case TargetedVariant::split: return "split";
    case TargetedVariant::target_only: return "target-only";
    case TargetedVariant::context_only: return "context-only";
  }
  return "unknown";
}

namespace {

void copy_row(std::span<const double> from, std::span<double> to) { std::copy(from.begin(), from.end(), to.begin()); }

struct ForwardPass {
  Matrix concat;  // B×3h
  Matrix logits;  // B×o
};

ForwardPass forward_batch(const TargetedParams& p, const TargetedFeatures& f, Side side, TargetedVariant variant) {
  const Matrix& proj = p.projection(side);
  const std::size_t h = p.joint_dim();
  const std::size_t rows = f.size();
  if (f.left.cols() != proj.rows()) {
    throw SizeError("targeted: embedding dimension " + std::to_string(f.left.cols()) + " vs projection rows " +
                    std::to_string(proj.rows()));
  }
  if (p.classifier.rows() != 3 * h) throw SizeError("targeted: classifier rows must equal 3h");

  ForwardPass out;
  out.concat = Matrix(rows, 3 * h);
  auto place = [&](const Matrix& block, std::size_t third) {
    for (std::size_t i = 0; i < rows; ++i) {
      auto src = block.row(i);
      std::copy(src.begin(), src.end(), out.concat.row(i).begin() + static_cast<std::ptrdiff_t>(third * h));
    }
  };

  if (variant != TargetedVariant::target_only) {
    place(matmul(f.left, proj), 0);
    place(matmul(f.right, proj), 2);
  }
  if (variant == TargetedVariant::context_only) {
    const Vector shared = vecmat(p.shared_target.row(0), p.source_projection);
    for (std::size_t i = 0; i < rows; ++i) {
      std::copy(shared.begin(), shared.end(), out.concat.row(i).begin() + static_cast<std::ptrdiff_t>(h));
    }
  } else {
    place(matmul(f.target, proj), 1);
  }
  out.logits = matmul(out.concat, p.classifier);
  return out;
}

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, first + j);
  return out;
}

TargetedGradients zero_gradients(const TargetedParams& p) {
  return {Matrix(p.source_projection.rows(), p.source_projection.cols()),
          Matrix(p.target_projection.rows(), p.target_projection.cols()),
          Matrix(p.classifier.rows(), p.classifier.cols()),
          Matrix(p.shared_target.rows(), p.shared_target.cols())};
}

LossTerms objective(const TargetedParams& p, double alpha, const TargetedFeatures& batch, const PairFeatures& pairs,
                    TargetedGradients* grads) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  if (pairs.source.cols() != p.source_projection.rows() || pairs.target.cols() != p.target_projection.rows()) {
    throw SizeError("targeted: lexicon pair dimensions do not match the projections");
  }
  LossTerms terms;
  const std::size_t h = p.joint_dim();

  const ForwardPass fwd = forward_batch(p, batch, Side::source, p.variant);
  Matrix dlogits;
  const bool want_sentiment_grad = grads && alpha != 0.0;
  terms.sentiment = detail::softmax_cross_entropy(fwd.logits, batch.labels, want_sentiment_grad ? &dlogits : nullptr);
  if (want_sentiment_grad) {
    dlogits *= alpha;
    grads->classifier += matmul_at_b(fwd.concat, dlogits);
    const Matrix dconcat = matmul(dlogits, p.classifier.transposed());
    if (p.variant != TargetedVariant::target_only) {
      grads->source_projection += matmul_at_b(batch.left, column_block(dconcat, 0, h));
      grads->source_projection += matmul_at_b(batch.right, column_block(dconcat, 2 * h, h));
    }
    const Matrix dtarget = column_block(dconcat, h, h);
    if (p.variant == TargetedVariant::context_only) {
      Matrix summed(1, h);
      for (std::size_t i = 0; i < dtarget.rows(); ++i)
        for (std::size_t j = 0; j < h; ++j) summed(0, j) += dtarget(i, j);
      grads->source_projection += matmul_at_b(p.shared_target, summed);
      grads->shared_target += matmul(summed, p.source_projection.transposed());
    } else {
      grads->source_projection += matmul_at_b(batch.target, dtarget);
    }
  }

  const Matrix zs = matmul(pairs.source, p.source_projection);
  const Matrix zt = matmul(pairs.target, p.target_projection);
  Matrix ddiff;
  const bool want_projection_grad = grads && alpha != 1.0;
  terms.projection = detail::alignment_penalty(zs, zt, true, want_projection_grad ? &ddiff : nullptr);
  if (want_projection_grad) {
    ddiff *= (1.0 - alpha);
    grads->source_projection += matmul_at_b(pairs.source, ddiff);
    grads->target_projection -= matmul_at_b(pairs.target, ddiff);
  }
  terms.joint = alpha * terms.sentiment + (1.0 - alpha) * terms.projection;
  return terms;
}

class TargetedObjective {
 public:
  TargetedObjective(TargetedParams& params, TargetedFeatures train, PairFeatures pairs, PairFeatures dev_pairs,
                    TargetedFeatures source_dev, TargetedFeatures target_dev)
      : params_(params),
        train_(std::move(train)),
        pairs_(std::move(pairs)),
        dev_pairs_(std::move(dev_pairs)),
        source_dev_(std::move(source_dev)),
        target_dev_(std::move(target_dev)) {}

  std::size_t example_count() const { return train_.size(); }
  std::size_t pair_count() const { return pairs_.size(); }

  std::vector<Matrix*> parameters() {
    std::vector<Matrix*> out{&params_.source_projection, &params_.target_projection, &params_.classifier};
    if (params_.variant == TargetedVariant::context_only) out.push_back(&params_.shared_target);
    return out;
  }

  LossTerms accumulate(std::span<const std::size_t> examples, std::span<const std::size_t> pair_rows, double alpha,
                       std::vector<Matrix>& grads) {
    TargetedGradients g = zero_gradients(params_);
    const LossTerms terms = objective(params_, alpha, train_.select(examples), pairs_.select(pair_rows), &g);
    grads[0] += g.source_projection;
    grads[1] += g.target_projection;
    grads[2] += g.classifier;
    if (params_.variant == TargetedVariant::context_only) grads[3] += g.shared_target;
    return terms;
  }

  bool all_oov() const {
    for (bool flagged : train_.oov_only)
      if (!flagged) return false;
    return true;
  }

  void fill_dev_metrics(EpochRecord& record) const {
    if (dev_pairs_.size() > 0) {
      record.dev_pair_cosine = mean_pair_cosine(matmul(dev_pairs_.source, params_.source_projection),
                                                matmul(dev_pairs_.target, params_.target_projection));
    }
    const std::size_t o = params_.label_count();
    if (source_dev_.size() > 0) {
      record.source_dev_f1 = macro_f1(source_dev_.labels, predict_targeted_all(params_, source_dev_, Side::source), o);
    }
    if (target_dev_.size() > 0) {
      record.target_dev_f1 = macro_f1(target_dev_.labels, predict_targeted_all(params_, target_dev_, Side::target), o);
    }
  }

 private:
  TargetedParams& params_;
  TargetedFeatures train_;
  PairFeatures pairs_;
  PairFeatures dev_pairs_;
  TargetedFeatures source_dev_;
  TargetedFeatures target_dev_;
};

}  // namespace

TargetedParams init_targeted(std::size_t d, std::size_t dprime, std::size_t h, std::size_t o, std::uint64_t seed,
                             TargetedVariant variant, InitMode mode) {
  // Projections come from the same draw as the sentence model.
  const BlseParams base = init_params(d, dprime, h, o, seed, mode, SentenceVariant::blse);
  TargetedParams p;
  p.variant = variant;
  p.source_projection = base.source_projection;
  p.target_projection = base.target_projection;

  Rng rng(mix_seed(seed, 7));
  p.classifier = Matrix(3 * h, o);
  const double bound = 1.0 / std::sqrt(static_cast<double>(3 * h));
  for (double& x : p.classifier.data()) x = rng.uniform(-bound, bound);
  if (variant == TargetedVariant::target_only) {
    for (std::size_t r = 0; r < 3 * h; ++r) {
      if (r >= h && r < 2 * h) continue;
      for (std::size_t c = 0; c < o; ++c) p.classifier(r, c) = 0.0;
    }
  }
  p.shared_target = Matrix(1, d);
  return p;
}

TargetedFeatures TargetedFeatures::select(std::span<const std::size_t> rows) const {
  TargetedFeatures out;
  out.left = Matrix(rows.size(), left.cols());
  out.target = Matrix(rows.size(), target.cols());
  out.right = Matrix(rows.size(), right.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    copy_row(left.row(rows[i]), out.left.row(i));
    copy_row(target.row(rows[i]), out.target.row(i));
    copy_row(right.row(rows[i]), out.right.row(i));
    out.labels.push_back(labels[rows[i]]);
    out.oov_only.push_back(oov_only[rows[i]]);
  }
  return out;
}

TargetedFeatures featurize_targeted(const EmbeddingSpace& space, std::span<const TargetedInstance> instances,
                                    OovPolicy policy) {
  TargetedFeatures out;
  const std::size_t d = space.dim();
  out.left = Matrix(instances.size(), d);
  out.target = Matrix(instances.size(), d);
  out.right = Matrix(instances.size(), d);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TargetSplit parts = split_at_target(instances[i]);
    copy_row(average(space, parts.left, policy), out.left.row(i));
    copy_row(average(space, parts.target, policy), out.target.row(i));
    copy_row(average(space, parts.right, policy), out.right.row(i));
    out.labels.push_back(instances[i].label);
    out.oov_only.push_back(count_known(space, instances[i].tokens) == 0);
  }
  return out;
}

namespace {

Vector single_forward(const TargetedParams& params, const EmbeddingSpace& space, const TargetedInstance& instance,
                      Side side, OovPolicy policy, TargetedVariant variant) {
  const TargetedFeatures f = featurize_targeted(space, std::span(&instance, 1), policy);
  return stable_softmax(forward_batch(params, f, side, variant).logits.row(0));
}

}  // namespace

Vector targeted_forward(const TargetedParams& params, const EmbeddingSpace& space, const TargetedInstance& instance,
                        Side side, OovPolicy policy) {
  return single_forward(params, space, instance, side, policy, TargetedVariant::split);
}

Vector variant_forward(const TargetedParams& params, const EmbeddingSpace& space, const TargetedInstance& instance,
                       Side side, OovPolicy policy) {
  return single_forward(params, space, instance, side, policy, params.variant);
}

std::size_t predict_targeted(const TargetedParams& params, const EmbeddingSpace& space,
                             const TargetedInstance& instance, Side side, OovPolicy policy) {
  return argmax(variant_forward(params, space, instance, side, policy));
}

std::vector<std::size_t> predict_targeted_all(const TargetedParams& params, const TargetedFeatures& features,
                                              Side side) {
  std::vector<std::size_t> out;
  if (features.size() == 0) return out;
  const ForwardPass fwd = forward_batch(params, features, side, params.variant);
  for (std::size_t i = 0; i < features.size(); ++i) out.push_back(argmax(stable_softmax(fwd.logits.row(i))));
  return out;
}

std::vector<std::size_t> sent_baseline(const BlseParams& sentence_model, const EmbeddingSpace& space,
                                       std::span<const TargetedInstance> instances, Side side, OovPolicy policy) {
  std::map<std::string, std::size_t> cache;
  std::vector<std::size_t> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.sentence_id) throw ArgumentError("sent_baseline: instance without a sentence id");
    auto it = cache.find(*inst.sentence_id);
    if (it == cache.end()) {
      it = cache.emplace(*inst.sentence_id, predict(sentence_model, space, inst.tokens, side, policy)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

LossTerms targeted_joint_loss(const TargetedParams& params, double alpha, const TargetedFeatures& batch,
                              const PairFeatures& pairs) {
  return objective(params, alpha, batch, pairs, nullptr);
}

TargetedGradients targeted_gradients(const TargetedParams& params, double alpha, const TargetedFeatures& batch,
                                     const PairFeatures& pairs) {
  TargetedGradients g = zero_gradients(params);
  objective(params, alpha, batch, pairs, &g);
  return g;
}

TargetedTrainResult train_targeted(const TrainConfig& config, const TargetedTrainingData& data,
                                   TargetedVariant variant) {
  config.validate();
  if (data.train.empty()) throw ArgumentError("train_targeted: empty corpus");
  if (data.lexicon_train.pairs.empty()) throw ArgumentError("train_targeted: empty lexicon");
  for (const auto& inst : data.train) {
    if (inst.label >= data.label_count) throw ArgumentError("train_targeted: label outside the label space");
  }

  const std::size_t d = data.source_space.dim();
  const std::size_t h = config.joint_dim == 0 ? d : config.joint_dim;
  TargetedTrainResult result;
  result.params = init_targeted(d, data.target_space.dim(), h, data.label_count,
                                mix_seed(config.seed, detail::kInitStream), variant, config.init);

  PairFeatures dev_pairs;
  if (data.lexicon_dev) dev_pairs = resolve_pairs(data.source_space, data.target_space, *data.lexicon_dev);
  TargetedObjective objective(result.params, featurize_targeted(data.source_space, data.train, config.oov_policy),
                              resolve_pairs(data.source_space, data.target_space, data.lexicon_train),
                              std::move(dev_pairs),
                              featurize_targeted(data.source_space, data.source_dev, config.oov_policy),
                              featurize_targeted(data.target_space, data.target_dev, config.oov_policy));
  result.history = detail::run_training(config, objective);
  return result;
}

}  // namespace xlsent

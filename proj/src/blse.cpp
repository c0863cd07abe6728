#include "xlsent/blse.hpp"

#include <cmath>
#include <ostream>

#include "model_ops.hpp"
#include "training_loop.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/eval.hpp"
#include "xlsent/random.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

std::size_t BlseParams::label_count() const noexcept {
  return variant == SentenceVariant::no_projection ? source_projection.cols() : classifier.cols();
}

const Matrix& BlseParams::projection(Side side) const {
  if (side == Side::source || variant == SentenceVariant::shared_projection) return source_projection;
  return target_projection;
}

std::string to_string(SentenceVariant variant) {
  switch (variant) {
    case SentenceVariant::blse: return "sentence";
    case SentenceVariant::shared_projection: return "no-mprime";
    case SentenceVariant::no_projection: return "no-proj";
  }
  return "unknown";
}

namespace {

Matrix uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& x : m.data()) x = rng.uniform(-bound, bound);
  return m;
}

Matrix init_projection(std::size_t rows, std::size_t cols, InitMode mode, Rng& rng) {
  // The uniform draw happens either way so the remaining matrices do not
  // depend on the init mode.
  Matrix m = uniform_matrix(rows, cols, rng);
  if (mode == InitMode::identity) {
    if (rows != cols) {
      throw ArgumentError("init_params: identity init needs a square projection (" + std::to_string(rows) +
                          "x" + std::to_string(cols) + ")");
    }
    m = Matrix::identity(rows);
  }
  return m;
}

void check_pair_dims(const BlseParams& p, const PairFeatures& pairs) {
  if (pairs.source.cols() != p.source_projection.rows()) {
    throw SizeError("pairs: source dimension " + std::to_string(pairs.source.cols()) + " vs projection rows " +
                    std::to_string(p.source_projection.rows()));
  }
  if (pairs.target.cols() != p.projection(Side::target).rows()) {
    throw SizeError("pairs: target dimension " + std::to_string(pairs.target.cols()) + " vs projection rows " +
                    std::to_string(p.projection(Side::target).rows()));
  }
}

Matrix logits_for(const BlseParams& p, const Matrix& averages, Side side, Matrix* joint) {
  const Matrix& proj = p.projection(side);
  if (averages.cols() != proj.rows()) {
    throw SizeError("sentiment: embedding dimension " + std::to_string(averages.cols()) +
                    " vs projection rows " + std::to_string(proj.rows()));
  }
  Matrix z = matmul(averages, proj);
  if (p.variant == SentenceVariant::no_projection) {
    if (joint) *joint = z;
    return z;
  }
  Matrix logits = matmul(z, p.classifier);
  if (joint) *joint = std::move(z);
  return logits;
}

// Joint loss of one batch; adds α- and (1−α)-weighted gradients to `grads`.
LossTerms objective(const BlseParams& p, double alpha, const Matrix& averages,
                    std::span<const std::size_t> labels, const PairFeatures& pairs, BlseGradients* grads) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  check_pair_dims(p, pairs);

  LossTerms terms;
  const bool has_head = p.variant != SentenceVariant::no_projection;

  Matrix joint;
  const Matrix logits = logits_for(p, averages, Side::source, &joint);
  Matrix dlogits;
  const bool want_sentiment_grad = grads && alpha != 0.0;
  terms.sentiment = detail::softmax_cross_entropy(logits, labels, want_sentiment_grad ? &dlogits : nullptr);
  if (want_sentiment_grad) {
    dlogits *= alpha;
    if (has_head) {
      grads->classifier += matmul_at_b(joint, dlogits);
      const Matrix djoint = matmul(dlogits, p.classifier.transposed());
      grads->source_projection += matmul_at_b(averages, djoint);
    } else {
      grads->source_projection += matmul_at_b(averages, dlogits);
    }
  }

  const Matrix zs = matmul(pairs.source, p.source_projection);
  const Matrix zt = matmul(pairs.target, p.projection(Side::target));
  const bool squared = p.variant != SentenceVariant::no_projection;
  Matrix ddiff;
  const bool want_projection_grad = grads && alpha != 1.0;
  terms.projection = detail::alignment_penalty(zs, zt, squared, want_projection_grad ? &ddiff : nullptr);
  if (want_projection_grad) {
    ddiff *= (1.0 - alpha);
    grads->source_projection += matmul_at_b(pairs.source, ddiff);
    if (p.variant == SentenceVariant::shared_projection) {
      grads->source_projection -= matmul_at_b(pairs.target, ddiff);
    } else {
      grads->target_projection -= matmul_at_b(pairs.target, ddiff);
    }
  }

  terms.joint = alpha * terms.sentiment + (1.0 - alpha) * terms.projection;
  return terms;
}

BlseGradients zero_gradients(const BlseParams& p) {
  return {Matrix(p.source_projection.rows(), p.source_projection.cols()),
          Matrix(p.target_projection.rows(), p.target_projection.cols()),
          Matrix(p.classifier.rows(), p.classifier.cols())};
}

class SentenceObjective {
 public:
  SentenceObjective(BlseParams& params, SentenceFeatures train, PairFeatures pairs, PairFeatures dev_pairs,
                    SentenceFeatures source_dev, SentenceFeatures target_dev)
      : params_(params),
        train_(std::move(train)),
        pairs_(std::move(pairs)),
        dev_pairs_(std::move(dev_pairs)),
        source_dev_(std::move(source_dev)),
        target_dev_(std::move(target_dev)) {}

  std::size_t example_count() const { return train_.size(); }
  std::size_t pair_count() const { return pairs_.size(); }

  std::vector<Matrix*> parameters() {
    std::vector<Matrix*> out{&params_.source_projection};
    if (!params_.target_projection.empty()) out.push_back(&params_.target_projection);
    if (!params_.classifier.empty()) out.push_back(&params_.classifier);
    return out;
  }

  LossTerms accumulate(std::span<const std::size_t> examples, std::span<const std::size_t> pair_rows,
                       double alpha, std::vector<Matrix>& grads) {
    const SentenceFeatures batch = train_.select(examples);
    const PairFeatures pairs = pairs_.select(pair_rows);
    BlseGradients g = zero_gradients(params_);
    const LossTerms terms = objective(params_, alpha, batch.averages, batch.labels, pairs, &g);
    std::size_t k = 0;
    grads[k++] += g.source_projection;
    if (!params_.target_projection.empty()) grads[k++] += g.target_projection;
    if (!params_.classifier.empty()) grads[k++] += g.classifier;
    return terms;
  }

  bool all_oov() const {
    for (bool flagged : train_.oov_only)
      if (!flagged) return false;
    return true;
  }

  void fill_dev_metrics(EpochRecord& record) const {
    if (dev_pairs_.size() > 0) record.dev_pair_cosine = dev_pair_cosine(params_, dev_pairs_);
    const std::size_t o = params_.label_count();
    if (source_dev_.size() > 0) {
      record.source_dev_f1 = macro_f1(source_dev_.labels, predict_all(params_, source_dev_, Side::source), o);
    }
    if (target_dev_.size() > 0) {
      record.target_dev_f1 = macro_f1(target_dev_.labels, predict_all(params_, target_dev_, Side::target), o);
    }
  }

 private:
  BlseParams& params_;
  SentenceFeatures train_;
  PairFeatures pairs_;
  PairFeatures dev_pairs_;
  SentenceFeatures source_dev_;
  SentenceFeatures target_dev_;
};

}  // namespace

BlseParams init_params(std::size_t d, std::size_t dprime, std::size_t h, std::size_t o, std::uint64_t seed,
                       InitMode mode, SentenceVariant variant) {
  if (d == 0 || dprime == 0 || h == 0 || o == 0) throw ArgumentError("init_params: dimensions must be >= 1");
  Rng rng(seed);
  BlseParams p;
  p.variant = variant;
  switch (variant) {
    case SentenceVariant::blse:
      p.source_projection = init_projection(d, h, mode, rng);
      p.target_projection = init_projection(dprime, h, mode, rng);
      p.classifier = uniform_matrix(h, o, rng);
      break;
    case SentenceVariant::shared_projection:
      if (d != dprime) throw ArgumentError("init_params: a shared projection needs equal source/target dimensions");
      p.source_projection = init_projection(d, h, mode, rng);
      // Drawn and discarded so M and P match the full model under one seed.
      (void)init_projection(dprime, h, mode, rng);
      p.classifier = uniform_matrix(h, o, rng);
      break;
    case SentenceVariant::no_projection:
      p.source_projection = uniform_matrix(d, o, rng);
      p.target_projection = uniform_matrix(dprime, o, rng);
      break;
  }
  return p;
}

SentenceFeatures SentenceFeatures::select(std::span<const std::size_t> rows) const {
  SentenceFeatures out;
  out.averages = Matrix(rows.size(), averages.cols());
  out.labels.reserve(rows.size());
  out.oov_only.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = averages.row(rows[i]);
    std::copy(src.begin(), src.end(), out.averages.row(i).begin());
    out.labels.push_back(labels[rows[i]]);
    out.oov_only.push_back(oov_only[rows[i]]);
  }
  return out;
}

SentenceFeatures featurize_sentences(const EmbeddingSpace& space, std::span<const LabeledSentence> sentences,
                                     OovPolicy policy) {
  SentenceFeatures out;
  out.averages = Matrix(sentences.size(), space.dim());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const Vector avg = average(space, sentences[i].tokens, policy);
    std::copy(avg.begin(), avg.end(), out.averages.row(i).begin());
    out.labels.push_back(sentences[i].label);
    out.oov_only.push_back(count_known(space, sentences[i].tokens) == 0);
  }
  return out;
}

PairFeatures PairFeatures::select(std::span<const std::size_t> rows) const {
  PairFeatures out{Matrix(rows.size(), source.cols()), Matrix(rows.size(), target.cols()), 0};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto s = source.row(rows[i]);
    auto t = target.row(rows[i]);
    std::copy(s.begin(), s.end(), out.source.row(i).begin());
    std::copy(t.begin(), t.end(), out.target.row(i).begin());
  }
  return out;
}

PairFeatures resolve_pairs(const EmbeddingSpace& source, const EmbeddingSpace& target,
                           const BilingualLexicon& lexicon) {
  std::vector<double> src_rows;
  std::vector<double> trg_rows;
  std::size_t found = 0;
  std::size_t skipped = 0;
  for (const auto& pair : lexicon.pairs) {
    const auto s = source.index_of(pair.source);
    const auto t = target.index_of(pair.target);
    if (!s || !t) {
      ++skipped;
      continue;
    }
    auto sv = source.vector(*s);
    auto tv = target.vector(*t);
    src_rows.insert(src_rows.end(), sv.begin(), sv.end());
    trg_rows.insert(trg_rows.end(), tv.begin(), tv.end());
    ++found;
  }
  return {Matrix(found, source.dim(), std::move(src_rows)), Matrix(found, target.dim(), std::move(trg_rows)),
          skipped};
}

Vector project(const BlseParams& params, std::span<const double> embedding, Side side) {
  return vecmat(embedding, params.projection(side));
}

double projection_loss(const BlseParams& params, const PairFeatures& pairs) {
  check_pair_dims(params, pairs);
  const Matrix zs = matmul(pairs.source, params.source_projection);
  const Matrix zt = matmul(pairs.target, params.projection(Side::target));
  return detail::alignment_penalty(zs, zt, params.variant != SentenceVariant::no_projection, nullptr);
}

Vector sentiment_probabilities(const BlseParams& params, std::span<const double> average, Side side) {
  const Matrix logits = logits_for(params, Matrix::row_vector(average), side, nullptr);
  return stable_softmax(logits.row(0));
}

SentimentOutput sentiment_forward(const BlseParams& params, const EmbeddingSpace& space,
                                  std::span<const std::string> tokens, Side side, OovPolicy policy) {
  SentimentOutput out;
  if (count_known(space, tokens) == 0) {
    out.oov_only = true;
    out.probabilities.assign(params.label_count(), 1.0 / static_cast<double>(params.label_count()));
    return out;
  }
  out.probabilities = sentiment_probabilities(params, average(space, tokens, policy), side);
  return out;
}

double sentiment_loss(const BlseParams& params, const SentenceFeatures& batch, Side side) {
  if (batch.size() == 0) throw ArgumentError("sentiment_loss: empty batch");
  return detail::softmax_cross_entropy(logits_for(params, batch.averages, side, nullptr), batch.labels, nullptr);
}

double sentiment_loss(const BlseParams& params, const EmbeddingSpace& space,
                      std::span<const LabeledSentence> batch, Side side) {
  if (batch.empty()) throw ArgumentError("sentiment_loss: empty batch");
  return sentiment_loss(params, featurize_sentences(space, batch), side);
}

LossTerms joint_loss(const BlseParams& params, double alpha, const SentenceFeatures& batch,
                     const PairFeatures& pairs) {
  return objective(params, alpha, batch.averages, batch.labels, pairs, nullptr);
}

BlseGradients gradients(const BlseParams& params, double alpha, const SentenceFeatures& batch,
                        const PairFeatures& pairs) {
  BlseGradients g = zero_gradients(params);
  objective(params, alpha, batch.averages, batch.labels, pairs, &g);
  return g;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
}

void TrainHistory::write_csv(std::ostream& out) const {
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_exact(v); };
  out << "epoch,H,MSE,J,dev_pair_cosine,src_f1,tgt_f1\n";
  for (const auto& r : records) {
    out << r.epoch << ',' << field(r.sentiment_loss) << ',' << field(r.projection_loss) << ','
        << field(r.joint_loss) << ',' << field(r.dev_pair_cosine) << ',' << field(r.source_dev_f1) << ','
        << field(r.target_dev_f1) << '\n';
  }
}

TrainResult train_variant(const TrainConfig& config, const SentenceTrainingData& data, SentenceVariant variant) {
  config.validate();
  if (data.train.empty()) throw ArgumentError("train: empty sentiment corpus");
  if (data.lexicon_train.pairs.empty()) throw ArgumentError("train: empty lexicon");
  for (const auto& s : data.train) {
    if (s.label >= data.label_count) throw ArgumentError("train: label outside the label space");
  }

  const std::size_t d = data.source_space.dim();
  const std::size_t dprime = data.target_space.dim();
  const std::size_t h = config.joint_dim == 0 ? d : config.joint_dim;

  TrainResult result;
  result.params = init_params(d, dprime, h, data.label_count, mix_seed(config.seed, detail::kInitStream),
                              config.init, variant);

  PairFeatures dev_pairs;
  if (data.lexicon_dev) dev_pairs = resolve_pairs(data.source_space, data.target_space, *data.lexicon_dev);

  SentenceObjective objective(result.params, featurize_sentences(data.source_space, data.train, config.oov_policy),
                              resolve_pairs(data.source_space, data.target_space, data.lexicon_train),
                              std::move(dev_pairs),
                              featurize_sentences(data.source_space, data.source_dev, config.oov_policy),
                              featurize_sentences(data.target_space, data.target_dev, config.oov_policy));
  result.history = detail::run_training(config, objective);
  return result;
}

TrainResult train(const TrainConfig& config, const SentenceTrainingData& data) {
  return train_variant(config, data, SentenceVariant::blse);
}

TrainResult train_no_mprime(const TrainConfig& config, const SentenceTrainingData& data) {
  return train_variant(config, data, SentenceVariant::shared_projection);
}

TrainResult train_no_projection(const TrainConfig& config, const SentenceTrainingData& data) {
  return train_variant(config, data, SentenceVariant::no_projection);
}

std::size_t predict(const BlseParams& params, const EmbeddingSpace& space, std::span<const std::string> tokens,
                    Side side, OovPolicy policy) {
  return argmax(sentiment_forward(params, space, tokens, side, policy).probabilities);
}

std::vector<std::size_t> predict_all(const BlseParams& params, const SentenceFeatures& features, Side side) {
  std::vector<std::size_t> out;
  out.reserve(features.size());
  if (features.size() == 0) return out;
  const Matrix logits = logits_for(params, features.averages, side, nullptr);
  for (std::size_t i = 0; i < features.size(); ++i) out.push_back(argmax(stable_softmax(logits.row(i))));
  return out;
}

double mean_pair_cosine(const Matrix& source_projected, const Matrix& target_projected) {
  if (!source_projected.same_shape(target_projected)) throw SizeError("mean_pair_cosine: shapes differ");
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < source_projected.rows(); ++i) {
    auto a = source_projected.row(i);
    auto b = target_projected.row(i);
    if (norm(a) == 0.0 || norm(b) == 0.0) continue;
    total += cosine(a, b);
    ++counted;
  }
  if (counted == 0) throw ArgumentError("mean_pair_cosine: no pair with nonzero projections");
  return total / static_cast<double>(counted);
}

double dev_pair_cosine(const BlseParams& params, const PairFeatures& pairs) {
  check_pair_dims(params, pairs);
  return mean_pair_cosine(matmul(pairs.source, params.source_projection),
                          matmul(pairs.target, params.projection(Side::target)));
}

}  // namespace xlsent

#include <cmath>
#include <set>

#include "doctest.h"
#include "gradient_check.hpp"
#include "synthetic.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/targeted.hpp"

using namespace xlsent;

namespace {

xlsent::testing::RotationTaskOptions small_task() {
  return {.vocabulary = 60, .dim = 6, .train_pairs = 40, .dev_pairs = 10, .polar_words = 10,
          .train_sentences = 60, .test_sentences = 20};
}

TargetedParams random_params(TargetedVariant variant, std::uint64_t seed) {
  TargetedParams p = init_targeted(6, 6, 4, 3, seed, variant);
  Rng rng(seed);
  for (double& x : p.classifier.data()) x = rng.normal();
  for (double& x : p.shared_target.data()) x = rng.normal();
  return p;
}

std::vector<std::string> random_tokens(const EmbeddingSpace& space, std::size_t n, Rng& rng) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(space.words()[rng.index(space.size())]);
  return out;
}

void check_close(const Vector& a, const Vector& b, double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

TargetedInstance make_instance(std::vector<std::string> left, std::vector<std::string> target,
                               std::vector<std::string> right, std::string sid = "s") {
  TargetedInstance inst;
  inst.tokens = left;
  inst.target_start = left.size();
  inst.tokens.insert(inst.tokens.end(), target.begin(), target.end());
  inst.target_end = inst.tokens.size();
  inst.tokens.insert(inst.tokens.end(), right.begin(), right.end());
  inst.sentence_id = std::move(sid);
  return inst;
}

}  // namespace

TEST_CASE("init shapes and masking") {
  const auto split = init_targeted(5, 7, 3, 4, 2, TargetedVariant::split);
  CHECK(split.classifier.rows() == 9);
  CHECK(split.classifier.cols() == 4);
  CHECK(split.target_projection.rows() == 7);
  CHECK(split.shared_target == Matrix(1, 5));
  const auto again = init_targeted(5, 7, 3, 4, 2, TargetedVariant::split);
  CHECK(again.classifier == split.classifier);
  CHECK(split.source_projection == init_params(5, 7, 3, 4, 2).source_projection);

  const auto masked = init_targeted(5, 7, 3, 4, 2, TargetedVariant::target_only);
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(masked.classifier(r, c) == (r >= 3 && r < 6 ? split.classifier(r, c) : 0.0));
}

TEST_CASE("target at position 0 gives an empty left third") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  TargetedParams p = random_params(TargetedVariant::split, 3);
  const auto& w = task.source.words();
  const auto inst = make_instance({}, {w[1]}, {w[2], w[3]});
  // Zeroing the left-third classifier rows must not change anything.
  TargetedParams masked = p;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) masked.classifier(r, c) = 123.0;
  check_close(targeted_forward(p, task.source, inst, Side::source),
              targeted_forward(masked, task.source, inst, Side::source));
}

TEST_CASE("zero classifier gives a uniform distribution") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  TargetedParams p = random_params(TargetedVariant::split, 4);
  p.classifier = Matrix(12, 3);
  const auto& w = task.target.words();
  const Vector out = targeted_forward(p, task.target, make_instance({w[0]}, {w[5]}, {w[9]}), Side::target);
  for (double x : out) CHECK(std::abs(x - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("forward equals split, average, project, concatenate, softmax") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  const TargetedParams p = random_params(TargetedVariant::split, 5);
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = make_instance(random_tokens(task.target, rng.index(4), rng),
                                    random_tokens(task.target, 1 + rng.index(2), rng),
                                    random_tokens(task.target, rng.index(4), rng));
    const TargetSplit parts = split_at_target(inst);
    Vector concat;
    for (auto part : {parts.left, parts.target, parts.right}) {
      const Vector z = vecmat(average(task.target, part), p.target_projection);
      concat.insert(concat.end(), z.begin(), z.end());
    }
    const Vector logits = vecmat(concat, p.classifier);
    check_close(targeted_forward(p, task.target, inst, Side::target), stable_softmax(logits));
  }
}

TEST_CASE("forward is invariant to permutations inside each segment") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  const TargetedParams p = random_params(TargetedVariant::split, 7);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto left = random_tokens(task.source, 1 + rng.index(4), rng);
    auto target = random_tokens(task.source, 1 + rng.index(3), rng);
    auto right = random_tokens(task.source, 1 + rng.index(4), rng);
    const Vector base = targeted_forward(p, task.source, make_instance(left, target, right), Side::source);
    rng.shuffle(std::span(left));
    check_close(base, targeted_forward(p, task.source, make_instance(left, target, right), Side::source));
    rng.shuffle(std::span(target));
    check_close(base, targeted_forward(p, task.source, make_instance(left, target, right), Side::source));
    rng.shuffle(std::span(right));
    check_close(base, targeted_forward(p, task.source, make_instance(left, target, right), Side::source));
  }
}

TEST_CASE("target-only depends only on the target span") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  const TargetedParams p = random_params(TargetedVariant::target_only, 9);
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto target = random_tokens(task.target, 1 + rng.index(2), rng);
    const auto a = make_instance(random_tokens(task.target, rng.index(5), rng), target,
                                 random_tokens(task.target, rng.index(5), rng));
    const auto b = make_instance(random_tokens(task.target, rng.index(5), rng), target,
                                 random_tokens(task.target, rng.index(5), rng));
    check_close(variant_forward(p, task.target, a, Side::target), variant_forward(p, task.target, b, Side::target));
  }
}

TEST_CASE("context-only ignores the target span") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  const TargetedParams p = random_params(TargetedVariant::context_only, 11);
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto left = random_tokens(task.source, rng.index(4), rng);
    const auto right = random_tokens(task.source, rng.index(4), rng);
    const auto a = make_instance(left, random_tokens(task.source, 1, rng), right);
    const auto b = make_instance(left, random_tokens(task.source, 2, rng), right);
    check_close(variant_forward(p, task.source, a, Side::source), variant_forward(p, task.source, b, Side::source));
  }
}

TEST_CASE("sent baseline labels whole sentences") {
  const auto task = xlsent::testing::make_rotation_task(small_task());
  const auto model = init_params(6, 6, 6, 2, 13);
  const auto& w = task.source.words();
  const std::vector<std::string> sentence{w[0], w[1], w[2], w[3]};
  std::vector<TargetedInstance> group;
  for (std::size_t t = 0; t < 3; ++t) {
    TargetedInstance inst{sentence, t, t + 1, t % 2, false, std::string("one")};
    group.push_back(inst);
  }
  const auto labels = sent_baseline(model, task.source, group, Side::source);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[1] == labels[2]);
  CHECK(labels[0] == predict(model, task.source, sentence, Side::source));

  Rng rng(14);
  std::vector<TargetedInstance> many;
  for (int s = 0; s < 30; ++s) {
    const auto tokens = random_tokens(task.source, 3 + rng.index(3), rng);
    for (std::size_t t = 0; t < 2; ++t) many.push_back({tokens, t, t + 1, 0, false, "s" + std::to_string(s)});
  }
  const auto out = sent_baseline(model, task.source, many, Side::source);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < many.size(); i += 2) {
    CHECK(out[i] == out[i + 1]);
    CHECK(out[i] == predict(model, task.source, many[i].tokens, Side::source));
    seen.insert(out[i]);
  }

  std::vector<TargetedInstance> anonymous{{sentence, 0, 1, 0, false, std::nullopt}};
  CHECK_THROWS_AS(sent_baseline(model, task.source, anonymous, Side::source), ArgumentError);
}

TEST_CASE("targeted gradients match finite differences") {
  for (auto variant : {TargetedVariant::split, TargetedVariant::target_only, TargetedVariant::context_only}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(to_string(variant));
      CAPTURE(seed);
      CHECK(xlsent::testing::targeted_gradient_error(variant, seed) < 1e-4);
    }
  }
}

TEST_CASE("targeted training: alpha = 1 freezes M', history and determinism") {
  const auto task = xlsent::testing::make_targeted_task(0.3, small_task());
  TargetedTrainingData data{task.base.source, task.base.target, task.train_source, task.base.lexicon_train,
                            &task.base.lexicon_dev, {}, task.test_target, 2};
  TrainConfig c;
  c.alpha = 1.0;
  c.epochs = 3;
  c.batch_size = 8;
  c.learning_rate = 0.01;
  c.seed = 5;
  const auto result = train_targeted(c, data, TargetedVariant::split);
  CHECK(result.params.target_projection == init_targeted(6, 6, 6, 2, mix_seed(5, 0), TargetedVariant::split).target_projection);
  CHECK(result.history.records.size() == 3);

  c.alpha = 0.3;
  for (auto variant : {TargetedVariant::split, TargetedVariant::target_only, TargetedVariant::context_only}) {
    const auto a = train_targeted(c, data, variant);
    const auto b = train_targeted(c, data, variant);
    CHECK(a.params.classifier == b.params.classifier);
    CHECK(a.params.shared_target == b.params.shared_target);
    CHECK(std::isfinite(a.history.records.back().target_dev_f1));
  }
  std::vector<TargetedInstance> sentence_level{{{"s1"}, 0, 0, 0, true, std::nullopt}};
  TargetedTrainingData bad{task.base.source, task.base.target, sentence_level, task.base.lexicon_train};
  CHECK_THROWS_AS(train_targeted(c, bad, TargetedVariant::split), ArgumentError);
}

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "synthetic.hpp"
#include "xlsent/embeddings.hpp"
#include "xlsent/errors.hpp"

using namespace xlsent;

namespace {

EmbeddingSpace load_text(const std::string& text, std::optional<std::size_t> limit = std::nullopt) {
  std::istringstream in(text);
  return load_embeddings(in, limit);
}

const char* kTwoByThree = "2 3\nfoo 1 2 3\nbar 4 5 6\n";

}  // namespace

TEST_CASE("load with header") {
  const auto space = load_text(kTwoByThree);
  CHECK(space.size() == 2);
  CHECK(space.dim() == 3);
  CHECK(space.index_of("bar") == 1u);
  CHECK(space.vector(1)[2] == 6.0);
}

TEST_CASE("load with a row limit keeps the first rows") {
  const auto space = load_text(kTwoByThree, 1);
  CHECK(space.size() == 1);
  CHECK(space.words()[0] == "foo");
  CHECK_FALSE(space.contains("bar"));
}

TEST_CASE("load without header infers the dimension") {
  const auto space = load_text("a 0.5 -1\nb 1 1\n");
  CHECK(space.size() == 2);
  CHECK(space.dim() == 2);
}

TEST_CASE("malformed row names its line") {
  try {
    load_text("2 3\nfoo 1 2 3\nbar 4 5\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_text("foo 1 x\n"), FormatError);
  CHECK_THROWS_AS(load_text(""), FormatError);
}

TEST_CASE("duplicate tokens are skipped and counted") {
  const auto space = load_text("a 1 0\na 0 1\nb 1 1\n");
  CHECK(space.size() == 2);
  CHECK(space.skipped_duplicates() == 1);
  CHECK(space.vector(0)[0] == 1.0);
  CHECK_THROWS_AS(EmbeddingSpace({"x", "x"}, Matrix(2, 1)), ArgumentError);
}

TEST_CASE("average: single token, pair, all unknown") {
  const auto space = load_text("u 1 2\nw 3 6\n");
  const std::vector<std::string> one{"u"}, two{"u", "w"}, none{"zz", "yy"};
  CHECK(average(space, one) == Vector{1, 2});
  CHECK(average(space, two) == Vector{2, 4});
  CHECK(average(space, none) == Vector{0, 0});
  CHECK(average(space, none, OovPolicy::zero) == Vector{0, 0});
  const std::vector<std::string> mixed{"u", "zz"};
  CHECK(average(space, mixed, OovPolicy::skip) == Vector{1, 2});
  CHECK(average(space, mixed, OovPolicy::zero) == Vector{0.5, 1});
  CHECK(count_known(space, mixed) == 1);
}

TEST_CASE("average is permutation invariant and copy invariant") {
  Rng rng(17);
  const auto task = xlsent::testing::make_rotation_task({.vocabulary = 30, .dim = 5, .train_pairs = 10,
                                                         .dev_pairs = 5, .polar_words = 5, .train_sentences = 1,
                                                         .test_sentences = 1});
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> tokens;
    for (int k = 0; k < 6; ++k) tokens.push_back(task.source.words()[rng.index(30)]);
    std::vector<std::string> shuffled = tokens;
    rng.shuffle(std::span(shuffled));
    const Vector a = average(task.source, tokens);
    const Vector b = average(task.source, shuffled);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);

    const std::vector<std::string> copies(1 + rng.index(5), tokens[0]);
    const Vector c = average(task.source, copies);
    const auto row = task.source.vector(*task.source.index_of(tokens[0]));
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - row[i]) < 1e-12);
  }
}

TEST_CASE("normalize rows") {
  const auto space = normalize_rows(load_text("a 3 4\nz 0 0\n"));
  CHECK(space.is_normalized());
  CHECK(std::abs(space.vector(0)[0] - 0.6) < 1e-15);
  CHECK(std::abs(space.vector(0)[1] - 0.8) < 1e-15);
  CHECK(space.vector(1)[0] == 0.0);
  const auto again = normalize_rows(space);
  for (std::size_t i = 0; i < again.vectors().size(); ++i)
    CHECK(std::abs(again.vectors().data()[i] - space.vectors().data()[i]) < 1e-12);
}

TEST_CASE("save then load preserves vectors within 1e-6") {
  Rng rng(2);
  Matrix m = xlsent::testing::random_gaussian(20, 7, rng);
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
  const auto space = normalize_rows(EmbeddingSpace(words, m));
  std::ostringstream out;
  save_embeddings(space, out);
  const auto back = load_text(out.str());
  REQUIRE(back.size() == 20);
  REQUIRE(back.dim() == 7);
  CHECK(back.words() == space.words());
  for (std::size_t i = 0; i < m.size(); ++i)
    CHECK(std::abs(back.vectors().data()[i] - space.vectors().data()[i]) <= 5e-7);
}

TEST_CASE("header-only file is an empty space") {
  const auto space = load_text("0 4\n");
  CHECK(space.size() == 0);
  CHECK(space.dim() == 4);
}

TEST_CASE("ascii lowercase leaves multibyte text alone") {
  CHECK(ascii_lower("HeLLo") == "hello");
  CHECK(ascii_lower("\xC3\x89T\xC3\x89") == "\xC3\x89t\xC3\x89");
}

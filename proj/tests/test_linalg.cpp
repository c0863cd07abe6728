#include <cmath>
#include <limits>

#include "doctest.h"
#include "synthetic.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/linalg.hpp"
#include "xlsent/random.hpp"

using namespace xlsent;
using xlsent::testing::random_gaussian;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

TEST_CASE("softmax of equal logits is uniform") {
  const Vector p = stable_softmax(Vector{0.0, 0.0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("softmax of log 1,2,3 gives 1/6, 2/6, 3/6") {
  const Vector p = stable_softmax(Vector{std::log(1.0), std::log(2.0), std::log(3.0)});
  CHECK(std::abs(p[0] - 1.0 / 6.0) < 1e-9);
  CHECK(std::abs(p[1] - 2.0 / 6.0) < 1e-9);
  CHECK(std::abs(p[2] - 3.0 / 6.0) < 1e-9);
}

TEST_CASE("softmax is shift invariant and sums to one") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(1 + rng.index(8));
    for (double& v : x) v = rng.uniform(-30, 30);
    const double c = rng.uniform(-500, 500);
    Vector shifted = x;
    for (double& v : shifted) v += c;
    const Vector p = stable_softmax(x);
    const Vector q = stable_softmax(shifted);
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::abs(p[i] - q[i]) < 1e-9);
      CHECK(p[i] >= 0.0);
      total += p[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("softmax survives huge logits and rejects bad input") {
  const Vector p = stable_softmax(Vector{1000.0, 0.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] >= 0.0);
  CHECK_THROWS_AS(stable_softmax(Vector{}), SizeError);
  CHECK_THROWS_AS(stable_softmax(Vector{1.0, std::numeric_limits<double>::quiet_NaN()}), NumericDomainError);
  CHECK_THROWS_AS(stable_softmax(Vector{std::numeric_limits<double>::infinity()}), NumericDomainError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(Vector{1.0, 3.0, 3.0}) == 1);
  CHECK(argmax(Vector{2.0, 2.0}) == 0);
}

TEST_CASE("matrix products agree with a triple loop") {
  Rng rng(11);
  const Matrix a = random_gaussian(4, 7, rng);
  const Matrix b = random_gaussian(7, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) < 1e-12);
  const Matrix c = random_gaussian(4, 5, rng);
  CHECK(max_abs_diff(matmul_at_b(a, c), naive_product(a.transposed(), c)) < 1e-12);
  const Vector v = vecmat(a.row(2), b);
  const Matrix row = naive_product(Matrix::row_vector(a.row(2)), b);
  for (std::size_t j = 0; j < v.size(); ++j) CHECK(std::abs(v[j] - row(0, j)) < 1e-12);
  CHECK_THROWS_AS(matmul(a, a), SizeError);
}

TEST_CASE("matrix product is associative within rounding") {
  Rng rng(12);
  const Matrix a = random_gaussian(10, 10, rng);
  const Matrix b = random_gaussian(10, 10, rng);
  const Matrix c = random_gaussian(10, 10, rng);
  const Matrix left = matmul(matmul(a, b), c);
  const Matrix right = matmul(a, matmul(b, c));
  CHECK(frobenius_norm(left - right) / frobenius_norm(left) < 1e-9);
}

TEST_CASE("cosine rejects zero vectors") {
  CHECK(cosine(Vector{1, 0}, Vector{0, 2}) == doctest::Approx(0.0));
  CHECK(cosine(Vector{1, 1}, Vector{2, 2}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine(Vector{0, 0}, Vector{1, 0}), NumericDomainError);
}

TEST_CASE("least squares: identity and scaled designs") {
  Rng rng(3);
  const Matrix b = random_gaussian(4, 2, rng);
  CHECK(max_abs_diff(least_squares_solve(Matrix::identity(4), b), b) < 1e-12);
  CHECK(max_abs_diff(least_squares_solve(2.0 * Matrix::identity(4), b), 0.5 * b) < 1e-12);
}

TEST_CASE("least squares: hand-solved overdetermined system") {
  const Matrix a = Matrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
  const Matrix b = Matrix::from_rows({{1}, {1}, {2}});
  const Matrix w = least_squares_solve(a, b);
  CHECK(std::abs(w(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(w(1, 0) - 1.0) < 1e-12);
  CHECK(frobenius_norm(matmul(a, w) - b) < 1e-12);
}

TEST_CASE("least squares: degenerate systems") {
  CHECK_THROWS_AS(least_squares_solve(Matrix(1, 2, 1.0), Matrix(1, 1, 1.0)), DegenerateSystemError);
  const Matrix collinear = Matrix::from_rows({{1, 2}, {2, 4}, {3, 6}});
  CHECK_THROWS_AS(least_squares_solve(collinear, Matrix(3, 1, 1.0)), DegenerateSystemError);
  CHECK_THROWS_AS(least_squares_solve(Matrix::identity(2), Matrix(3, 1)), SizeError);
}

TEST_CASE("least squares minimizes the residual against entry perturbations") {
  Rng rng(21);
  const Matrix a = random_gaussian(20, 5, rng);
  const Matrix b = random_gaussian(20, 3, rng);
  const Matrix w = least_squares_solve(a, b);
  const auto residual = [&](const Matrix& x) {
    const double r = frobenius_norm(matmul(a, x) - b);
    return r * r;
  };
  const double best = residual(w);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix p = w;
    p.data()[rng.index(p.size())] += rng.bernoulli(0.5) ? 1e-3 : -1e-3;
    CHECK(best <= residual(p));
  }
}

TEST_CASE("thin SVD reconstructs and orders singular values") {
  Rng rng(8);
  const Matrix a = random_gaussian(9, 4, rng);
  const Svd svd = thin_svd(a);
  Matrix scaled = svd.u;
  for (std::size_t r = 0; r < scaled.rows(); ++r)
    for (std::size_t c = 0; c < scaled.cols(); ++c) scaled(r, c) *= svd.singular[c];
  CHECK(max_abs_diff(matmul(scaled, svd.v.transposed()), a) < 1e-10);
  for (std::size_t i = 1; i < svd.singular.size(); ++i) CHECK(svd.singular[i - 1] >= svd.singular[i]);
  CHECK(max_abs_diff(matmul_at_b(svd.v, svd.v), Matrix::identity(4)) < 1e-10);
}

TEST_CASE("orthonormal factor and nearest orthogonal are orthogonal") {
  Rng rng(9);
  const Matrix q = orthonormal_factor(random_gaussian(6, 6, rng));
  CHECK(max_abs_diff(matmul_at_b(q, q), Matrix::identity(6)) < 1e-10);
  const Matrix r = nearest_orthogonal(random_gaussian(5, 5, rng));
  CHECK(max_abs_diff(matmul_at_b(r, r), Matrix::identity(5)) < 1e-10);
  CHECK(max_abs_diff(nearest_orthogonal(q), q) < 1e-10);
}

TEST_CASE("cholesky solve") {
  const Matrix s = Matrix::from_rows({{4, 2}, {2, 3}});
  const Matrix b = Matrix::from_rows({{2}, {1}});
  const Matrix x = cholesky_solve(s, b);
  CHECK(max_abs_diff(matmul(s, x), b) < 1e-12);
  CHECK_THROWS_AS(cholesky_solve(Matrix::from_rows({{1, 2}, {2, 1}}), b), DegenerateSystemError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Matrix params = Matrix::from_rows({{1.5, -2.0}, {0.25, 3.0}});
  const Matrix before = params;
  AdamState state(2, 2, 1e-3);
  adam_step(params, Matrix(2, 2), state);
  CHECK(params == before);
  CHECK(state.timestep == 1);
}

TEST_CASE("adam: first step has magnitude lr·|g|/(|g|+eps)") {
  for (double g : {0.5, -3.0, 1e-4}) {
    Matrix params(1, 1, 0.0);
    AdamState state(1, 1, 1e-3);
    adam_step(params, Matrix(1, 1, g), state);
    const double expected = 1e-3 * std::abs(g) / (std::abs(g) + 1e-8);
    CHECK(std::abs(std::abs(params(0, 0)) - expected) < 1e-18);
    CHECK((params(0, 0) < 0) == (g > 0));
  }
}

TEST_CASE("adam: second identical step follows the moment recursion") {
  // g = 0.5, lr = 1e-3:
  // m1 = 0.05, v1 = 0.00025; m2 = 0.9·0.05 + 0.1·0.5 = 0.095;
  // v2 = 0.999·0.00025 + 0.001·0.25 = 0.00049975;
  // m̂2 = 0.095 / 0.19 = 0.5; v̂2 = 0.00049975 / 0.001999 = 0.25;
  // step2 = 1e-3 · 0.5 / (0.5 + 1e-8).
  Matrix params(1, 1, 0.0);
  AdamState state(1, 1, 1e-3);
  const Matrix g(1, 1, 0.5);
  adam_step(params, g, state);
  const double after_first = params(0, 0);
  adam_step(params, g, state);
  const double step2 = after_first - params(0, 0);
  const double m2 = 0.095, v2 = 0.00049975;
  const double expected = 1e-3 * (m2 / 0.19) / (std::sqrt(v2 / 0.001999) + 1e-8);
  CHECK(std::abs(expected - 1e-3 * 0.5 / (0.5 + 1e-8)) < 1e-15);
  CHECK(std::abs(step2 - expected) < 1e-15);
  CHECK(std::abs(state.first_moment(0, 0) - m2) < 1e-15);
  CHECK(std::abs(state.second_moment(0, 0) - v2) < 1e-15);
}

TEST_CASE("adam is deterministic and checks shapes") {
  Rng rng(4);
  const Matrix g1 = random_gaussian(3, 2, rng), g2 = random_gaussian(3, 2, rng);
  Matrix a(3, 2, 1.0), b(3, 2, 1.0);
  AdamState sa(3, 2), sb(3, 2);
  for (const Matrix* g : {&g1, &g2, &g1}) {
    adam_step(a, *g, sa);
    adam_step(b, *g, sb);
  }
  CHECK(a == b);
  CHECK_THROWS_AS(adam_step(a, Matrix(2, 2), sa), SizeError);
}

TEST_CASE("finite differences: sum gives ones, half squared norm gives x") {
  Rng rng(6);
  const Matrix x = random_gaussian(3, 4, rng);
  const auto sum = [](const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v;
    return s;
  };
  CHECK(max_abs_diff(finite_difference_gradient(sum, x, 1e-5), Matrix(3, 4, 1.0)) < 1e-9);
  const auto half_sq = [](const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return 0.5 * s;
  };
  CHECK(max_abs_diff(finite_difference_gradient(half_sq, x, 1e-5), x) < 1e-9);
}

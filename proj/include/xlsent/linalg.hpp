#pragma once

// Dense row-major matrices in double precision plus the handful of
// numerical kernels the models need: softmax, least squares, SVD and ADAM.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace xlsent {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  // Single-row matrix holding `v`.
  static Matrix row_vector(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  bool all_finite() const noexcept;
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double scale);
Matrix operator*(double scale, Matrix a);

Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b without materializing the transpose.
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// Row vector times matrix: v·m.
Vector vecmat(std::span<const double> v, const Matrix& m);

double frobenius_norm(const Matrix& m);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
// Throws NumericDomainError when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

// Softmax with max-subtraction. Throws SizeError on empty input and
// NumericDomainError on non-finite logits.
Vector stable_softmax(std::span<const double> logits);

// argmax with ties resolved toward the lowest index.
std::size_t argmax(std::span<const double> values);

struct Svd {
  Matrix u;              // n×d, orthonormal columns
  Vector singular;       // d values, descending
  Matrix v;              // d×d orthogonal
};

// Thin SVD by one-sided Jacobi rotations. Requires rows >= cols.
Svd thin_svd(const Matrix& a);

// W minimizing ‖A·W − B‖_F² via the normal equations (AᵀA)W = AᵀB.
// Throws DegenerateSystemError when A has fewer rows than columns or when
// its smallest/largest singular value ratio falls below 1e-10.
Matrix least_squares_solve(const Matrix& a, const Matrix& b);

// Solves S·X = B for symmetric positive definite S by Cholesky.
Matrix cholesky_solve(const Matrix& spd, const Matrix& b);

// Orthonormal factor Q of a thin QR decomposition (modified Gram-Schmidt).
Matrix orthonormal_factor(const Matrix& a);

// Closest orthogonal matrix in Frobenius norm (polar factor U·Vᵀ).
Matrix nearest_orthogonal(const Matrix& square);

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  std::size_t timestep = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;

  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, double lr = 1e-3);
};

// One bias-corrected ADAM update of `params` in place.
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

// Central differences (f(x+h·e) − f(x−h·e)) / 2h for every entry of x.
Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                  const Matrix& x, double h);

}  // namespace xlsent

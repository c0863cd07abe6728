#include "xlsent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xlsent/errors.hpp"

namespace xlsent {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw SizeError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw SizeError("Matrix: data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw SizeError("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::row_vector(std::span<const double> v) {
  return Matrix(1, v.size(), std::vector<double>(v.begin(), v.end()));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scale) {
  for (double& x : data_) x *= scale;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double scale) { return a *= scale; }
Matrix operator*(double scale, Matrix a) { return a *= scale; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw SizeError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw SizeError("matmul_at_b: row counts " + std::to_string(a.rows()) + " and " +
                    std::to_string(b.rows()));
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a_row[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

Vector vecmat(std::span<const double> v, const Matrix& m) {
  if (v.size() != m.rows()) {
    throw SizeError("vecmat: vector of length " + std::to_string(v.size()) +
                    " against matrix with " + std::to_string(m.rows()) + " rows");
  }
  Vector out(m.cols(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) continue;
    auto row = m.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[k] * row[j];
  }
  return out;
}

double frobenius_norm(const Matrix& m) { return norm(m.data()); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw SizeError("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw NumericDomainError("cosine: zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Vector stable_softmax(std::span<const double> logits) {
  if (logits.empty()) throw SizeError("stable_softmax: empty logits");
  for (double x : logits) {
    if (!std::isfinite(x)) throw NumericDomainError("stable_softmax: non-finite logit");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw SizeError("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Svd thin_svd(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (n < d) throw SizeError("thin_svd: requires rows >= cols");

  Matrix u = a;
  Matrix v = Matrix::identity(d);
  constexpr double kTolerance = 1e-15;
  constexpr int kMaxSweeps = 80;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += u(i, j) * u(i, j);
    sigma[j] = std::sqrt(sq);
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(n, d), Vector(d), Matrix(d, d)};
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t j = order[k];
    out.singular[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.u(i, k) = sigma[j] > 0.0 ? u(i, j) / sigma[j] : 0.0;
    for (std::size_t i = 0; i < d; ++i) out.v(i, k) = v(i, j);
  }
  return out;
}

Matrix cholesky_solve(const Matrix& spd, const Matrix& b) {
  const std::size_t d = spd.rows();
  if (spd.cols() != d || b.rows() != d) throw SizeError("cholesky_solve: shape mismatch");

  Matrix lower(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0)) throw DegenerateSystemError("cholesky_solve: matrix is not positive definite");
    lower(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double acc = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= lower(i, k) * lower(j, k);
      lower(i, j) = acc / lower(j, j);
    }
  }

  Matrix x = b;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = x(i, c);
      for (std::size_t k = 0; k < i; ++k) acc -= lower(i, k) * x(k, c);
      x(i, c) = acc / lower(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double acc = x(i, c);
      for (std::size_t k = i + 1; k < d; ++k) acc -= lower(k, i) * x(k, c);
      x(i, c) = acc / lower(i, i);
    }
  }
  return x;
}

Matrix least_squares_solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw SizeError("least_squares_solve: A and B row counts differ");
  if (a.cols() == 0) throw SizeError("least_squares_solve: A has no columns");
  if (a.rows() < a.cols()) {
    throw DegenerateSystemError("least_squares_solve: underdetermined system (" +
                                std::to_string(a.rows()) + " rows < " + std::to_string(a.cols()) +
                                " columns)");
  }
  const Svd svd = thin_svd(a);
  const double largest = svd.singular.front();
  const double smallest = svd.singular.back();
  if (largest == 0.0 || smallest / largest < 1e-10) {
    throw DegenerateSystemError("least_squares_solve: rank-deficient design matrix (singular value ratio " +
                                std::to_string(largest == 0.0 ? 0.0 : smallest / largest) + ")");
  }
  return cholesky_solve(matmul_at_b(a, a), matmul_at_b(a, b));
}

Matrix orthonormal_factor(const Matrix& a) {
  Matrix q = a;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < q.rows(); ++i) proj += q(i, k) * q(i, j);
      for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) -= proj * q(i, k);
    }
    double len = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) len += q(i, j) * q(i, j);
    len = std::sqrt(len);
    if (len == 0.0) throw DegenerateSystemError("orthonormal_factor: linearly dependent columns");
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) /= len;
  }
  return q;
}

Matrix nearest_orthogonal(const Matrix& square) {
  if (square.rows() != square.cols()) throw SizeError("nearest_orthogonal: matrix is not square");
  const Svd svd = thin_svd(square);
  return matmul(svd.u, svd.v.transposed());
}

AdamState::AdamState(std::size_t rows, std::size_t cols, double lr)
    : first_moment(rows, cols), second_moment(rows, cols), learning_rate(lr) {}

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
  require_same_shape(params, grads, "adam_step");
  require_same_shape(params, state.first_moment, "adam_step (first moment)");
  require_same_shape(params, state.second_moment, "adam_step (second moment)");

  ++state.timestep;
  const double t = static_cast<double>(state.timestep);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);

  auto p = params.data();
  auto g = grads.data();
  auto m = state.first_moment.data();
  auto v = state.second_moment.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                  const Matrix& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite_difference_gradient: step must be positive");
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  auto probe_data = probe.data();
  auto grad_data = grad.data();
  for (std::size_t i = 0; i < probe_data.size(); ++i) {
    const double original = probe_data[i];
    probe_data[i] = original + h;
    const double up = f(probe);
    probe_data[i] = original - h;
    const double down = f(probe);
    probe_data[i] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericDomainError("finite_difference_gradient: non-finite function value");
    }
    grad_data[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace xlsent

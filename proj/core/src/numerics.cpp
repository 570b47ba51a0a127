// Copyright 2026 The cpoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cpoint/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpoint/error.hpp"

namespace cpoint {

Givens givens(double v1, double v2) {
  if (v2 == 0.0) return {1.0, 0.0};
  if (std::abs(v1) >= std::abs(v2)) {
    const double tau = -v2 / v1;
    const double c = 1.0 / std::sqrt(1.0 + tau * tau);
    return {c, c * tau};
  }
  const double tau = -v1 / v2;
  const double s = 1.0 / std::sqrt(1.0 + tau * tau);
  return {s * tau, s};
}

void apply_givens(Matrix& m, std::size_t i, std::size_t j, const Givens& g, std::size_t from) {
  for (std::size_t k = from; k < m.cols(); ++k) {
    const double a = m(i, k);
    const double b = m(j, k);
    m(i, k) = g.c * a - g.s * b;
    m(j, k) = g.s * a + g.c * b;
  }
}

namespace {

double max_column_norm(const Matrix& b) {
  double best = 0.0;
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i) s += b(i, j) * b(i, j);
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

void check_diagonal(const QrFactors& f) {
  for (std::size_t i = 0; i < f.r.rows(); ++i) {
    if (!(std::abs(f.r(i, i)) > f.zero_tol)) {
      throw Error(ErrorCode::kSingularBasis,
                  "basis is singular at position " + std::to_string(i));
    }
  }
}

// Rotates r to upper triangular form, applying the same rotations to qt.
void triangularize(Matrix& r, Matrix& qt) {
  const std::size_t m = r.rows();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = j + 1; i < m; ++i) {
      if (r(i, j) == 0.0) continue;
      const Givens g = givens(r(j, j), r(i, j));
      apply_givens(r, j, i, g, j);
      apply_givens(qt, j, i, g);
      r(i, j) = 0.0;
    }
  }
}

}  // namespace

QrFactors qr_factor(const Matrix& source, std::span<const std::size_t> basis) {
  if (basis.size() != source.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "basis size must equal the row count");
  }
  QrFactors f;
  f.basis_columns.assign(basis.begin(), basis.end());
  f.b = select_columns(source, basis);
  f.r = f.b;
  f.qt = Matrix::identity(f.b.rows());
  f.zero_tol = kRelativePivotTol * std::max(max_column_norm(f.b), 1e-300);
  triangularize(f.r, f.qt);
  check_diagonal(f);
  return f;
}

QrFactors qr_factor(const Matrix& square) {
  if (square.rows() != square.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "qr_factor expects a square matrix");
  }
  std::vector<std::size_t> basis(square.cols());
  for (std::size_t j = 0; j < basis.size(); ++j) basis[j] = j;
  return qr_factor(square, basis);
}

QrFactors qr_replace_column(QrFactors f, const Matrix& source, std::size_t leaving_pos,
                            std::size_t entering_col) {
  const std::size_t m = f.r.rows();
  if (leaving_pos >= m || entering_col >= source.cols() || source.rows() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "qr_replace_column index out of range");
  }
  const Vector a = source.column(entering_col);

  f.basis_columns.erase(f.basis_columns.begin() + static_cast<std::ptrdiff_t>(leaving_pos));
  f.basis_columns.push_back(entering_col);

  if (f.updates_since_refactor + 1 >= kRefactorInterval) {
    return qr_factor(source, f.basis_columns);
  }

  const Vector y = f.qt * std::span<const double>(a);

  Matrix r(m, m);
  Matrix b(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t dst = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == leaving_pos) continue;
      r(i, dst) = f.r(i, j);
      b(i, dst) = f.b(i, j);
      ++dst;
    }
    r(i, m - 1) = y[i];
    b(i, m - 1) = a[i];
  }
  // Columns leaving_pos..m-2 now carry one subdiagonal entry each.
  for (std::size_t i = leaving_pos; i + 1 < m; ++i) {
    if (r(i + 1, i) == 0.0) continue;
    const Givens g = givens(r(i, i), r(i + 1, i));
    apply_givens(r, i, i + 1, g, i);
    apply_givens(f.qt, i, i + 1, g);
    r(i + 1, i) = 0.0;
  }
  f.r = std::move(r);
  f.b = std::move(b);
  f.zero_tol = std::max(f.zero_tol, kRelativePivotTol * norm2(a));
  ++f.updates_since_refactor;
  check_diagonal(f);
  return f;
}

// Both solves refine once against the stored basis columns.
Vector qr_solve(const QrFactors& f, std::span<const double> v) {
  auto solve = [&f](std::span<const double> rhs) { return solve_upper(f.r, f.qt * rhs); };
  Vector x = solve(v);
  Vector res(v.begin(), v.end());
  const Vector bx = f.b * x;
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= bx[i];
  const Vector dx = solve(res);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

Vector qr_solve_transpose(const QrFactors& f, std::span<const double> c) {
  // B^T y = c  <=>  R^T (Q^T y) = c
  auto solve = [&f](std::span<const double> rhs) {
    return multiply_transposed(f.qt, solve_upper_transposed(f.r, rhs));
  };
  Vector y = solve(c);
  Vector res(c.begin(), c.end());
  const Vector bty = multiply_transposed(f.b, y);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= bty[i];
  const Vector dy = solve(res);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += dy[i];
  return y;
}

Matrix cholesky(const Matrix& s, double rel_tol) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "cholesky expects a square matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(s(i, i)));
  const double tol = rel_tol * std::max(max_diag, 1e-300);
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "non-positive pivot at row " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

Vector solve_lower(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x[k];
    x[i] = v / l(i, i);
  }
  return x;
}

Vector solve_upper(const Matrix& u, std::span<const double> b) {
  const std::size_t n = u.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= u(ii, k) * x[k];
    x[ii] = v / u(ii, ii);
  }
  return x;
}

Vector solve_lower_transposed(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * x[k];
    x[ii] = v / l(ii, ii);
  }
  return x;
}

Vector solve_upper_transposed(const Matrix& u, std::span<const double> b) {
  const std::size_t n = u.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= u(k, i) * x[k];
    x[i] = v / u(i, i);
  }
  return x;
}

}  // namespace cpoint

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

// Dense factorizations used by the simplex engine and the option engine.
//
// The basis factorization keeps B = QR with Q stored as Q^T. A column
// exchange deletes a column of R, appends Q^T a and restores triangularity
// with a sweep of Givens rotations applied to both factors. Solves take one
// step of iterative refinement against the stored basis columns.

#ifndef CPOINT_NUMERICS_HPP_
#define CPOINT_NUMERICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "cpoint/matrix.hpp"

namespace cpoint {

struct Givens {
  double c = 1.0;
  double s = 0.0;
};

// Rotation that zeroes v2 when applied as
//   v1' = c*v1 - s*v2,  v2' = s*v1 + c*v2.
// |tau| <= 1 in both branches so no intermediate overflows.
Givens givens(double v1, double v2);

// Applies g to rows i (playing v1) and j (playing v2) of m, columns [from, cols).
void apply_givens(Matrix& m, std::size_t i, std::size_t j, const Givens& g,
                  std::size_t from = 0);

struct QrFactors {
  Matrix r;                                // upper triangular, m x m
  Matrix qt;                               // Q^T with B = Q R
  Matrix b;                                // basis columns in basis order
  std::vector<std::size_t> basis_columns;  // indices into the source matrix
  std::size_t updates_since_refactor = 0;
  double zero_tol = 0.0;                   // |r_ii| below this is singular
};

inline constexpr std::size_t kRefactorInterval = 64;
inline constexpr double kRelativePivotTol = 1e-12;

// Factors the columns `basis` of `source`. Throws SingularBasis.
QrFactors qr_factor(const Matrix& source, std::span<const std::size_t> basis);
// Factors a square matrix with basis 0..m-1.
QrFactors qr_factor(const Matrix& square);

// Removes the column at position leaving_pos and appends source column
// entering_col at the end of the basis order. Refactors from scratch every
// kRefactorInterval exchanges. Throws SingularBasis.
QrFactors qr_replace_column(QrFactors f, const Matrix& source, std::size_t leaving_pos,
                            std::size_t entering_col);

// B^{-1} v
Vector qr_solve(const QrFactors& f, std::span<const double> v);
// B^{-T} c
Vector qr_solve_transpose(const QrFactors& f, std::span<const double> c);

// Lower triangular L with S = L L^T. Throws NotPositiveDefinite when a pivot
// falls to rel_tol * max|diag| or below, and DimensionMismatch when S is not
// square.
Matrix cholesky(const Matrix& s, double rel_tol = 1e-13);

Vector solve_lower(const Matrix& l, std::span<const double> b);
Vector solve_upper(const Matrix& u, std::span<const double> b);
// L^T x = b
Vector solve_lower_transposed(const Matrix& l, std::span<const double> b);
// U^T x = b
Vector solve_upper_transposed(const Matrix& u, std::span<const double> b);

}  // namespace cpoint

#endif  // CPOINT_NUMERICS_HPP_

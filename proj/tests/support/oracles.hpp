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

// Reference implementations used only by the tests. They share no code with
// the library beyond the plain Matrix container, and favour obviousness over
// speed.

#ifndef CPOINT_TESTS_SUPPORT_ORACLES_HPP_
#define CPOINT_TESTS_SUPPORT_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <random>
#include <span>
#include <vector>

#include "cpoint/error.hpp"
#include "cpoint/matrix.hpp"
#include "cpoint/parametric_qp.hpp"

namespace cpoint::oracle {

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<Vector> gauss_solve(Matrix a, Vector b);

// Brute-force LP: min c x, A x = d, x >= 0 by enumerating every basis.
struct VertexOptimum {
  bool feasible = false;
  bool bounded = true;  // false when some feasible ray decreases cx
  Vector x;
  double value = 0.0;
};
VertexOptimum enumerate_vertices(const Matrix& a, const Vector& d, const Vector& c);

// min 1/2 x'Qx - eta p'x over the unit simplex sampled on a grid of the given
// step (n <= 3).
struct GridOptimum {
  Vector x;
  double value = 0.0;
};
GridOptimum simplex_grid_search(const Matrix& q, const Vector& p, double eta, double step);

double qp_objective(const Matrix& q, const Vector& p, double eta, std::span<const double> x);

// Largest violation of the optimality conditions of
// min 1/2 x'Qx - eta p'x, Te x = te, Tl x <= tl, x >= 0 at (x, s, l, e).
double kkt_violation(const QpModel& m, double eta, std::span<const double> x, std::span<const double> s,
                     std::span<const double> l, std::span<const double> e);

// Exact minimizer by enumerating active sets of the bound and inequality
// constraints (small problems only).
std::optional<Vector> active_set_enumeration(const QpModel& m, double eta);

// Random generators.
Matrix random_covariance(std::mt19937_64& rng, std::size_t n, double min_eig = 0.05);
Matrix random_correlation(std::mt19937_64& rng, std::size_t n);
// Normal constraint plus up to max_ineq random inequalities that keep a
// random interior point feasible.
QpModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t max_ineq);

// The code of the cpoint::Error thrown by f, or nullopt when f returns.
template <class F>
std::optional<ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Contents of a file under tests/data.
std::string read_fixture(const std::string& name);

}  // namespace cpoint::oracle

#endif  // CPOINT_TESTS_SUPPORT_ORACLES_HPP_

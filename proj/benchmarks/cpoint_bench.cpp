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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cpoint/frontier.hpp"
#include "cpoint/moments.hpp"
#include "cpoint/numerics.hpp"
#include "cpoint/parametric_qp.hpp"

namespace cpoint {
namespace {

// Budget constraint plus a cap of 3/n on every asset.
QpModel capped_model(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.1 * z(rng);
  QpModel m;
  m.q = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * a(j, k);
      m.q(i, j) = s + (i == j ? 0.01 : 0.0);
    }
    m.names.push_back("A" + std::to_string(i));
    m.p.push_back(0.05 + 0.02 * z(rng));
  }
  m.eq = Matrix(1, n);
  for (std::size_t j = 0; j < n; ++j) m.eq(0, j) = 1.0;
  m.eq_rhs = {1.0};
  m.ineq = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m.ineq(i, i) = 1.0;
    m.ineq_rhs.push_back(3.0 / static_cast<double>(n));
  }
  return m;
}

void BM_Sweep(benchmark::State& state) {
  const QpModel m = capped_model(static_cast<std::size_t>(state.range(0)), 7);
  std::size_t points = 0;
  for (auto _ : state) {
    CriticalPath p = sweep(m);
    points = p.points.size();
    benchmark::DoNotOptimize(p);
  }
  state.counters["critical_points"] = static_cast<double>(points);
}
BENCHMARK(BM_Sweep)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_FrontierSelect(benchmark::State& state) {
  const Frontier f = build_frontier(sweep(capped_model(32, 7)));
  const double lo = f.min_return(), hi = f.max_return();
  double e = lo;
  for (auto _ : state) {
    e += 0.001 * (hi - lo);
    if (e > hi) e = lo;
    benchmark::DoNotOptimize(select(f, SelectBy::kReturn, e));
  }
}
BENCHMARK(BM_FrontierSelect);

Matrix random_matrix(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = z(rng);
  return a;
}

// One basis exchange by Givens update against factoring the new basis.
void BM_QrReplaceColumn(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(m, 2 * m);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = i;
  const QrFactors f = qr_factor(a, basis);
  for (auto _ : state) benchmark::DoNotOptimize(qr_replace_column(f, a, m / 2, m + 1));
}
BENCHMARK(BM_QrReplaceColumn)->Arg(16)->Arg(64)->Arg(128);

void BM_QrRefactor(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(m, 2 * m);
  std::vector<std::size_t> basis;
  for (std::size_t i = 0; i < m; ++i)
    if (i != m / 2) basis.push_back(i);
  basis.push_back(m + 1);
  for (auto _ : state) benchmark::DoNotOptimize(qr_factor(a, basis));
}
BENCHMARK(BM_QrRefactor)->Arg(16)->Arg(64)->Arg(128);

void BM_OptionCovSameAsset(benchmark::State& state) {
  const ReturnLeg call{LegKind::kCall, 56, 10.9, 63.2, 1.0};
  const ReturnLeg put{LegKind::kPut, 72, 10.9, 63.2, 0.75};
  for (auto _ : state) benchmark::DoNotOptimize(option_cov_same_asset(call, put, 0.03, 0.3));
}
BENCHMARK(BM_OptionCovSameAsset);

void BM_OptionCovCrossAsset(benchmark::State& state) {
  const UnderlyingLaw la{0.02, 0.25}, lb{-0.01, 0.35};
  const ReturnLeg a{LegKind::kCall, 66, 5.0, 63.2, 1.0};
  const ReturnLeg b{LegKind::kPut, 40, 3.5, 42.0, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(option_cov_cross_asset(a, la, b, lb, 0.55));
}
BENCHMARK(BM_OptionCovCrossAsset)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace cpoint

BENCHMARK_MAIN();

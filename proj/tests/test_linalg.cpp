// Copyright 2026 The Stampede Authors
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

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "stampede/linalg/krylov.hpp"
#include "stampede/linalg/vec.hpp"

using namespace stampede::linalg;

namespace {

// Random SPD matrix of size n, returned dense (the oracle side).
Eigen::MatrixXd random_spd(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(eng);
  return g.transpose() * g + n * Eigen::MatrixXd::Identity(n, n);
}

// Packs a dense symmetric matrix into BlockSparseSym, skipping zero blocks.
BlockSparseSym pack_blocks(const Eigen::MatrixXd& dense, int bd) {
  const int count = static_cast<int>(dense.rows()) / bd;
  BlockSparseSym a(bd, count);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) {
      Eigen::MatrixXd blk = dense.block(i * bd, j * bd, bd, bd);
      if (blk.isZero(0.0) && i != j) continue;
      double* b = a.block(i, j);
      for (int r = 0; r < bd; ++r)
        for (int c = 0; c < bd; ++c) b[r * bd + c] = blk(r, c);
    }
  }
  return a;
}

std::vector<double> random_vector(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss;
  std::vector<double> v(n);
  for (auto& x : v) x = gauss(eng);
  return v;
}

}  // namespace

TEST_CASE("apply: identity blocks return the input") {
  BlockSparseSym a(3, 2);
  for (int i = 0; i < 2; ++i) {
    double* b = a.block(i, i);
    b[0] = b[4] = b[8] = 1.0;
  }
  std::vector<double> x = {3, -1, 2, 0.5, 7, -4};
  auto y = a.apply(x);
  for (int i = 0; i < 6; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-15));
}

TEST_CASE("apply: empty matrix gives zero") {
  BlockSparseSym a(3, 2);
  std::vector<double> x = {1, 2, 3, 4, 5, 6};
  auto y = a.apply(x);
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("apply: matches dense multiply on random SPD blocks") {
  std::mt19937_64 eng(42);
  const int bd = 6, count = 3, n = bd * count;
  Eigen::MatrixXd dense = random_spd(n, eng);
  BlockSparseSym a = pack_blocks(dense, bd);
  REQUIRE(a.pattern_symmetric());

  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_vector(n, eng);
    auto y = a.apply(x);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::VectorXd expect = dense * xv;
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(y[i] - expect(i)) <= 1e-12 * std::max(1.0, std::abs(expect(i))));
  }
}

TEST_CASE("apply is linear") {
  std::mt19937_64 eng(7);
  const int bd = 6, count = 4, n = bd * count;
  BlockSparseSym a = pack_blocks(random_spd(n, eng), bd);
  auto x = random_vector(n, eng);
  auto y = random_vector(n, eng);
  const double alpha = 1.7, beta = -0.3;
  std::vector<double> combo(n);
  for (int i = 0; i < n; ++i) combo[i] = alpha * x[i] + beta * y[i];
  auto lhs = a.apply(combo);
  auto ax = a.apply(x);
  auto ay = a.apply(y);
  for (int i = 0; i < n; ++i)
    CHECK(lhs[i] == doctest::Approx(alpha * ax[i] + beta * ay[i]).epsilon(1e-12));
}

TEST_CASE("apply rejects dimension mismatch") {
  BlockSparseSym a(3, 2);
  std::vector<double> bad(5);
  CHECK_THROWS_AS(a.apply(bad), std::invalid_argument);
}

TEST_CASE("solve_krylov: identity system converges in one iteration") {
  BlockSparseSym a(3, 2);
  for (int i = 0; i < 2; ++i) {
    double* b = a.block(i, i);
    b[0] = b[4] = b[8] = 1.0;
  }
  std::vector<double> b = {3, -1, 2, 4, -5, 0.25};
  auto [x, stats] = solve_krylov(a, b, 1e-10, 50);
  CHECK(stats.converged);
  CHECK(stats.iterations == 1);
  for (int i = 0; i < 6; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("solve_krylov: zero rhs returns zero without iterating") {
  std::mt19937_64 eng(3);
  BlockSparseSym a = pack_blocks(random_spd(12, eng), 6);
  std::vector<double> b(12, 0.0);
  auto [x, stats] = solve_krylov(a, b, 1e-8, 20);
  CHECK(stats.converged);
  CHECK(stats.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("solve_krylov: random 12x12 SPD matches dense solve") {
  std::mt19937_64 eng(11);
  Eigen::MatrixXd dense = random_spd(12, eng);
  BlockSparseSym a = pack_blocks(dense, 6);
  auto b = random_vector(12, eng);
  auto [x, stats] = solve_krylov(a, b, 1e-12, 100);
  CHECK(stats.converged);

  Eigen::Map<const Eigen::VectorXd> bv(b.data(), 12);
  Eigen::VectorXd expect = dense.ldlt().solve(bv);
  for (int i = 0; i < 12; ++i)
    CHECK(std::abs(x[i] - expect(i)) <= 1e-8 * std::max(1.0, expect.norm()));
}

TEST_CASE("solve_krylov: SPD instances match dense solve and residuals decrease") {
  std::mt19937_64 eng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int count = 1 + static_cast<int>(eng() % 8);
    const int bd = 6, n = bd * count;
    Eigen::MatrixXd dense = random_spd(n, eng);
    BlockSparseSym a = pack_blocks(dense, bd);
    auto b = random_vector(n, eng);

    auto [x, stats] = solve_krylov(a, b, 1e-10, n + 10);
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
    Eigen::VectorXd expect = dense.ldlt().solve(bv);
    const double scale = std::max(1.0, expect.norm());
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - expect(i)) <= 1e-8 * scale);

    for (std::size_t k = 1; k < stats.residual_history.size(); ++k)
      CHECK(stats.residual_history[k] <= stats.residual_history[k - 1] + 1e-9);
  }
}

TEST_CASE("solve_krylov: truncation reports non-convergence with finite iterate") {
  std::mt19937_64 eng(5);
  // Ill-conditioned SPD system so two iterations cannot reach 1e-14.
  Eigen::MatrixXd dense = random_spd(30, eng);
  dense += 1e6 * Eigen::VectorXd::LinSpaced(30, 0, 1).asDiagonal().toDenseMatrix();
  BlockSparseSym a = pack_blocks(dense, 6);
  auto b = random_vector(30, eng);
  auto [x, stats] = solve_krylov(a, b, 1e-14, 2);
  CHECK_FALSE(stats.converged);
  CHECK(stats.iterations == 2);
  for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("solve_krylov rejects non-finite input") {
  BlockSparseSym a(3, 1);
  double* blk = a.block(0, 0);
  blk[0] = blk[4] = blk[8] = 1.0;
  std::vector<double> b = {1, std::numeric_limits<double>::quiet_NaN(), 0};
  CHECK_THROWS_AS(solve_krylov(a, b, 1e-8, 10), std::invalid_argument);

  blk[1] = std::numeric_limits<double>::infinity();
  std::vector<double> ok = {1, 2, 3};
  CHECK_THROWS_AS(solve_krylov(a, ok, 1e-8, 10), std::invalid_argument);
}

TEST_CASE("quaternion basics") {
  Quat q = Quat::from_axis_angle({0, 0, 1}, M_PI / 2);
  Vec3 v = q.rotate({1, 0, 0});
  CHECK(v.x == doctest::Approx(0).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(1).epsilon(1e-12));
  CHECK(q.rotate_inverse(v).x == doctest::Approx(1));
  CHECK(q.yaw() == doctest::Approx(M_PI / 2));

  Quat r = Quat::exp_map({0, 0, M_PI});
  CHECK(r.rotate({1, 0, 0}).x == doctest::Approx(-1));

  Mat3 m = q.to_matrix();
  Vec3 mv = m * Vec3{1, 0, 0};
  CHECK(mv.y == doctest::Approx(1));

  Mat3 inv = m.inverse();
  Vec3 back = inv * mv;
  CHECK(back.x == doctest::Approx(1));
}

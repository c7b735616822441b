#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "cda/linalg.hpp"

using namespace cda;

TEST_CASE("direct solve on identity") {
  std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  const SpMat A = from_triplets(3, 3, trips);
  VecX b(3);
  b << 1.0, -2.0, 3.0;
  SolveReport report;
  const VecX x = solve(A, b, {}, &report);
  CHECK((x - b).norm() < 1e-14);
  CHECK(report.residual < 1e-14);
}

TEST_CASE("direct solve on diagonal system") {
  std::vector<Triplet> trips{{0, 0, 2.0}, {1, 1, 0.5}};
  const SpMat A = from_triplets(2, 2, trips);
  VecX b(2);
  b << 4.0, 1.0;
  const VecX x = solve(A, b, {});
  CHECK(x[0] == Catch::Approx(2.0).margin(1e-14));
  CHECK(x[1] == Catch::Approx(2.0).margin(1e-14));
}

namespace {
SpMat random_spd(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = dist(gen);
  Eigen::MatrixXd D = R.transpose() * R + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(D(i, j)) > 0.3 || i == j) trips.emplace_back(i, j, D(i, j));
  return from_triplets(n, n, trips);
}
}  // namespace

TEST_CASE("direct and iterative backends agree with a dense solve") {
  const SpMat A = random_spd(50, 7);
  const Eigen::MatrixXd Ad(A);
  VecX b(50);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) b[i] = dist(gen);
  const VecX x_ref = Ad.fullPivLu().solve(b);

  const VecX x_lu = solve(A, b, {});
  CHECK((x_lu - x_ref).norm() / x_ref.norm() < 1e-10);

  SolverOptions gm;
  gm.backend = SolverOptions::Backend::gmres;
  gm.tol = 1e-12;
  SolveReport report;
  const VecX x_gm = solve(A, b, gm, &report);
  CHECK((x_gm - x_ref).norm() / x_ref.norm() < 1e-8);
  CHECK(report.iterations > 0);
}

TEST_CASE("solves are deterministic") {
  const SpMat A = random_spd(30, 3);
  VecX b = VecX::LinSpaced(30, -1.0, 2.0);
  const VecX x1 = solve(A, b, {});
  const VecX x2 = solve(A, b, {});
  CHECK((x1 - x2).norm() == 0.0);
}

TEST_CASE("singular matrix raises") {
  std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, 0.0}};
  const SpMat A = from_triplets(2, 2, trips);
  VecX b(2);
  b << 1.0, 1.0;
  CHECK_THROWS(solve(A, b, {}));
}

TEST_CASE("cached factorization solves repeated systems") {
  const SpMat A = random_spd(40, 5);
  DirectSolver cached;
  cached.factorize(A);
  const Eigen::MatrixXd Ad(A);
  for (int k = 0; k < 3; ++k) {
    VecX b = VecX::Constant(40, 1.0 + k);
    const VecX x = cached.solve(b);
    CHECK((Ad * x - b).norm() / b.norm() < 1e-12);
  }
}

TEST_CASE("relative residual measures defect") {
  std::vector<Triplet> trips{{0, 0, 2.0}, {1, 1, 2.0}};
  const SpMat A = from_triplets(2, 2, trips);
  VecX b(2), x(2);
  b << 2.0, 2.0;
  x << 1.0, 0.0;
  CHECK(relative_residual(A, x, b) == Catch::Approx(2.0 / b.norm()).epsilon(1e-12));
}

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "cda/assemble.hpp"
#include "cda/space.hpp"
#include "oracles.hpp"

using namespace cda;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
const TriMesh& small_mesh() {
  static const TriMesh mesh = build_structured({0.0, 0.0, 1.0, 1.0}, 2);
  return mesh;
}
}  // namespace

TEST_CASE("P1 mass matrix on a single element") {
  TriMesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  mesh.triangles = {{0, 1, 2}};
  mesh.h_max = std::sqrt(2.0);
  const auto sp = build_space(mesh, 1, 1);
  const MatrixXd M(assemble_mass(sp));
  const double K = mesh.area(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(M(i, j) == Catch::Approx(i == j ? K / 6.0 : K / 12.0).epsilon(1e-13));
}

TEST_CASE("mass matrix integrates constants to the domain area") {
  const auto& mesh = small_mesh();
  for (int order : {0, 1, 2}) {
    for (int arity : {1, 2}) {
      const auto sp = build_space(mesh, order, arity);
      const SpMat M = assemble_mass(sp);
      const VecX ones = VecX::Ones(sp.n_dofs());
      CHECK(ones.dot(M * ones) ==
            Catch::Approx(arity * mesh.total_area()).epsilon(1e-13));
    }
  }
}

TEST_CASE("P0 mass matrix is the diagonal of element areas") {
  const auto& mesh = small_mesh();
  const auto sp = build_space(mesh, 0, 1);
  const MatrixXd M(assemble_mass(sp));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CHECK(M(t, t) == Catch::Approx(mesh.area(t)).epsilon(1e-14));
    for (int s = 0; s < mesh.n_triangles(); ++s)
      if (s != t) CHECK(M(t, s) == 0.0);
  }
}

TEST_CASE("mass matrix matches the dense oracle") {
  const auto& mesh = small_mesh();
  for (int order : {1, 2}) {
    const auto sp = build_space(mesh, order, 1);
    const MatrixXd M(assemble_mass(sp));
    const MatrixXd ref = oracle::dense_mass(sp, tri_quadrature_degree6());
    CHECK((M - ref).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("stiffness matrix annihilates constants and scales linearly") {
  const auto& mesh = small_mesh();
  const auto sp = build_space(mesh, 2, 1);
  const SpMat A1 = assemble_stiffness(sp, 1.0);
  const SpMat A3 = assemble_stiffness(sp, 3.0);
  const VecX ones = VecX::Ones(sp.n_dofs());
  CHECK((A1 * ones).norm() < 1e-12);
  CHECK((MatrixXd(A3) - 3.0 * MatrixXd(A1)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS(assemble_stiffness(build_space(mesh, 0, 1), 1.0));
}

TEST_CASE("P1 stiffness on the reference element") {
  TriMesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  mesh.triangles = {{0, 1, 2}};
  mesh.h_max = std::sqrt(2.0);
  const auto sp = build_space(mesh, 1, 1);
  const MatrixXd A(assemble_stiffness(sp, 1.0));
  MatrixXd ref(3, 3);
  ref << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  CHECK((A - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stiffness matrix matches the dense oracle") {
  const auto& mesh = small_mesh();
  const auto sp = build_space(mesh, 2, 2);
  const MatrixXd A(assemble_stiffness(sp, 2.5));
  const MatrixXd ref = oracle::dense_stiffness(sp, 2.5, tri_quadrature_degree6());
  CHECK((A - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("convection matrix is exactly skew symmetric") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const auto scal = build_space(mesh, 2, 1);
  const VecX w = interpolate(
      vel, [](const Vec2& x, double) { return Vec2(std::cos(x.y()), std::sin(x.x())); },
      0.0);
  for (const FESpace* sp : {&vel, &scal}) {
    const SpMat N = assemble_convection_skew(*sp, vel, w);
    const MatrixXd Nd(N);
    CHECK((Nd + Nd.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("convection energy vanishes for random fields") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const VecX w = oracle::random_vector(vel.n_dofs(), 17);
  const SpMat N = assemble_convection_skew(vel, vel, w);
  for (unsigned seed = 0; seed < 100; ++seed) {
    const VectorXd x = oracle::random_vector(vel.n_dofs(), 100 + seed);
    const double energy = x.dot(N * x);
    CHECK(std::abs(energy) <=
          1e-12 * x.squaredNorm() * w.cwiseAbs().maxCoeff() + 1e-14);
  }
}

TEST_CASE("convection matches the dense skew oracle") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const auto scal = build_space(mesh, 2, 1);
  const VecX w = oracle::random_vector(vel.n_dofs(), 23);
  for (const FESpace* sp : {&vel, &scal}) {
    const MatrixXd N(assemble_convection_skew(*sp, vel, w));
    const MatrixXd ref =
        oracle::dense_convection_skew(*sp, vel, w, tri_quadrature_degree6());
    CHECK((N - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("divergence matrix annihilates rigid rotation") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const auto pres = build_space(mesh, 1, 1);
  const SpMat B = assemble_divergence(vel, pres);
  const VecX rot = interpolate(
      vel, [](const Vec2& x, double) { return Vec2(0.3 - x.y(), x.x() - 0.7); }, 0.0);
  CHECK((B * rot).norm() < 1e-12);
}

TEST_CASE("divergence matches the dense oracle") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const auto pres = build_space(mesh, 1, 1);
  const MatrixXd B(assemble_divergence(vel, pres));
  const MatrixXd ref = oracle::dense_divergence(vel, pres, tri_quadrature_degree6());
  CHECK((B - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("buoyancy load pairs gravity with the scalar fields") {
  const auto& mesh = small_mesh();
  const auto vel = build_space(mesh, 2, 2);
  const auto scal = build_space(mesh, 2, 1);
  PhysicalParams p;
  p.beta_T = 2.0;
  p.beta_C = 0.5;
  p.gravity = Vec2(0.0, -1.0);
  const VecX T = interpolate(scal, [](const Vec2& x, double) { return x.x(); }, 0.0);
  const VecX S = interpolate(scal, [](const Vec2& x, double) { return x.y(); }, 0.0);
  const VecX f = assemble_buoyancy_rhs(vel, scal, T, S, p);

  // same functional through the generic load assembler
  const VecX ref = assemble_load(
      vel,
      [&](const Vec2& x, double) {
        return Vec2(0.0, -(p.beta_T * x.x() + p.beta_C * x.y()));
      },
      0.0);
  CHECK((f - ref).norm() < 1e-12);
}

TEST_CASE("load vector integrates simple functionals exactly") {
  const auto& mesh = small_mesh();
  const auto sp = build_space(mesh, 2, 1);
  const VecX f1 = assemble_load(sp, [](const Vec2&, double) { return 1.0; }, 0.0);
  const VecX ones = VecX::Ones(sp.n_dofs());
  CHECK(f1.dot(ones) == Catch::Approx(mesh.total_area()).epsilon(1e-13));

  // f = x against phi = 1 gives the first moment 1/2
  const VecX fx = assemble_load(sp, [](const Vec2& x, double) { return x.x(); }, 0.0);
  CHECK(fx.dot(ones) == Catch::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("load vector uses the evaluation time") {
  const auto& mesh = small_mesh();
  const auto sp = build_space(mesh, 1, 1);
  const VecX f0 = assemble_load(sp, [](const Vec2&, double t) { return t; }, 1.0);
  const VecX f2 = assemble_load(sp, [](const Vec2&, double t) { return t; }, 2.0);
  CHECK((f2 - 2.0 * f0).norm() < 1e-13);
}

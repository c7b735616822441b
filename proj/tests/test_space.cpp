#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "cda/space.hpp"

using namespace cda;

namespace {
const TriMesh& unit_mesh() {
  static const TriMesh mesh = build_structured({0.0, 0.0, 1.0, 1.0}, 4);
  return mesh;
}
}  // namespace

TEST_CASE("space dof counts") {
  const auto& mesh = unit_mesh();
  const auto p0 = build_space(mesh, 0, 1);
  const auto p1 = build_space(mesh, 1, 1);
  const auto p2 = build_space(mesh, 2, 2);
  const auto p1dc = build_space(mesh, 1, 1, Continuity::discontinuous);

  CHECK(p0.n_dofs() == mesh.n_triangles());
  CHECK(p1.n_dofs() == mesh.n_vertices());
  // P2 nodes = vertices + edges; Euler: E = (3T + boundary)/2
  const int n_edges = (3 * mesh.n_triangles() + static_cast<int>(mesh.boundary_edges.size())) / 2;
  CHECK(p2.n_dofs() == 2 * (mesh.n_vertices() + n_edges));
  CHECK(p1dc.n_dofs() == 3 * mesh.n_triangles());
}

TEST_CASE("basis functions form a partition of unity") {
  const auto& mesh = unit_mesh();
  for (int order : {0, 1, 2}) {
    const auto sp = build_space(mesh, order, 1);
    for (const std::array<double, 3>& b :
         {std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3},
          std::array<double, 3>{0.2, 0.5, 0.3}, std::array<double, 3>{1.0, 0.0, 0.0}}) {
      const auto basis = eval_basis(sp, 0, b);
      double sum = 0.0;
      Vec2 grad_sum = Vec2::Zero();
      for (int i = 0; i < basis.n; ++i) {
        sum += basis.values[i];
        grad_sum += basis.grads[i];
      }
      CHECK(sum == Catch::Approx(1.0).margin(1e-14));
      CHECK(grad_sum.norm() < 1e-12);
    }
  }
}

TEST_CASE("P2 basis is nodal") {
  const auto& mesh = unit_mesh();
  const auto sp = build_space(mesh, 2, 1);
  // local nodes: vertices then edge midpoints (01, 12, 20)
  const std::array<std::array<double, 3>, 6> node_bary = {{{1, 0, 0},
                                                           {0, 1, 0},
                                                           {0, 0, 1},
                                                           {0.5, 0.5, 0},
                                                           {0, 0.5, 0.5},
                                                           {0.5, 0, 0.5}}};
  for (int i = 0; i < 6; ++i) {
    const auto basis = eval_basis(sp, 3, node_bary[i]);
    for (int j = 0; j < 6; ++j)
      CHECK(basis.values[j] == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-14));
  }
}

TEST_CASE("interpolation reproduces polynomials of matching degree") {
  const auto& mesh = unit_mesh();
  const auto p1 = build_space(mesh, 1, 1);
  const auto p2 = build_space(mesh, 2, 1);

  auto linear = [](const Vec2& x, double) { return 2.0 * x.x() - 3.0 * x.y() + 1.0; };
  auto quadratic = [](const Vec2& x, double) {
    return x.x() * x.x() - 2.0 * x.x() * x.y() + 0.5 * x.y() * x.y() + x.x();
  };

  const VecX c1 = interpolate(p1, linear, 0.0);
  const VecX c2 = interpolate(p2, quadratic, 0.0);

  const std::array<double, 3> b{0.37, 0.21, 0.42};
  for (int t = 0; t < mesh.n_triangles(); t += 7) {
    const auto& tri = mesh.triangles[t];
    const Vec2 x = b[0] * mesh.vertices[tri[0]] + b[1] * mesh.vertices[tri[1]] +
                   b[2] * mesh.vertices[tri[2]];
    double v = 0.0;
    eval_field(p1, c1, t, b, &v);
    CHECK(v == Catch::Approx(linear(x, 0.0)).margin(1e-13));
    eval_field(p2, c2, t, b, &v);
    CHECK(v == Catch::Approx(quadratic(x, 0.0)).margin(1e-13));
  }
}

TEST_CASE("vector interpolation fills both components") {
  const auto& mesh = unit_mesh();
  const auto sp = build_space(mesh, 2, 2);
  auto field = [](const Vec2& x, double) { return Vec2(x.y(), -x.x()); };
  const VecX c = interpolate(sp, field, 0.0);
  double out[2];
  eval_field(sp, c, 5, {0.3, 0.3, 0.4}, out);
  const auto& tri = mesh.triangles[5];
  const Vec2 x = 0.3 * mesh.vertices[tri[0]] + 0.3 * mesh.vertices[tri[1]] +
                 0.4 * mesh.vertices[tri[2]];
  CHECK(out[0] == Catch::Approx(x.y()).margin(1e-13));
  CHECK(out[1] == Catch::Approx(-x.x()).margin(1e-13));
}

TEST_CASE("dirichlet dofs pick tagged boundary nodes") {
  const auto& mesh = unit_mesh();
  const auto sp = build_space(mesh, 2, 1);
  const auto left = dirichlet_dofs(sp, {kLeft});
  // x=0 side: 5 vertices + 4 edge midpoints
  CHECK(left.size() == 9);
  for (int d : left) CHECK(sp.node_coords[d].x() == Catch::Approx(0.0).margin(1e-14));

  const auto all = dirichlet_dofs(sp, {kLeft, kRight, kBottom, kTop});
  CHECK(all.size() == 32);  // 16 boundary vertices + 16 boundary edge midpoints

  const auto vec = build_space(mesh, 2, 2);
  CHECK(dirichlet_dofs(vec, {kLeft}).size() == 18);
}

TEST_CASE("discontinuous spaces reject dirichlet lookup") {
  const auto& mesh = unit_mesh();
  const auto p0 = build_space(mesh, 0, 1);
  const auto p1dc = build_space(mesh, 1, 1, Continuity::discontinuous);
  CHECK_THROWS(dirichlet_dofs(p0, {kLeft}));
  CHECK_THROWS(dirichlet_dofs(p1dc, {kLeft}));
}

TEST_CASE("basis evaluation rejects invalid barycentric input") {
  const auto& mesh = unit_mesh();
  const auto sp = build_space(mesh, 1, 1);
  CHECK_THROWS(eval_basis(sp, 0, {0.5, 0.5, 0.5}));
  CHECK_THROWS(eval_basis(sp, 0, {-0.2, 0.6, 0.6}));
}

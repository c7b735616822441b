#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "cda/mesh.hpp"

namespace cda {

using VecX = Eigen::VectorXd;

enum class Continuity { continuous, discontinuous };

// Lagrange space on a TriMesh. Scalar "nodes" carry the geometry; a DOF is a
// (node, component) pair, components interleaved: dof = node*arity + comp.
//   P1: one node per vertex.  P2: vertices then edge midpoints.
//   P0: one node per triangle (barycenter), always discontinuous.
//   Discontinuous P1 duplicates the vertex nodes per triangle.
struct FESpace {
  const TriMesh* mesh = nullptr;
  int order = 1;
  int arity = 1;
  Continuity continuity = Continuity::continuous;

  int n_nodes = 0;
  std::vector<Vec2> node_coords;
  std::vector<std::array<int, 6>> tri_nodes;  // local -> global scalar node
  std::vector<std::vector<int>> node_tags;    // boundary tags per node

  int n_local_nodes() const { return order == 0 ? 1 : (order == 1 ? 3 : 6); }
  int n_dofs() const { return arity * n_nodes; }
  int dof(int node, int comp) const { return node * arity + comp; }
};

namespace detail {

inline std::map<std::pair<int, int>, int> enumerate_edges(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const auto key = std::minmax(a, b);
      edges.emplace(key, static_cast<int>(edges.size()));
    }
  }
  return edges;
}

}  // namespace detail

inline FESpace build_space(const TriMesh& mesh, int order, int arity,
                           Continuity continuity = Continuity::continuous) {
  if (order < 0 || order > 2) throw std::invalid_argument("build_space: unsupported order");
  if (arity != 1 && arity != 2) throw std::invalid_argument("build_space: arity must be 1 or 2");
  if (order == 0) continuity = Continuity::discontinuous;

  FESpace sp;
  sp.mesh = &mesh;
  sp.order = order;
  sp.arity = arity;
  sp.continuity = continuity;
  sp.tri_nodes.resize(mesh.n_triangles(), {-1, -1, -1, -1, -1, -1});

  if (order == 0) {
    sp.n_nodes = mesh.n_triangles();
    sp.node_coords.resize(sp.n_nodes);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      sp.node_coords[t] = mesh.barycenter(t);
      sp.tri_nodes[t][0] = t;
    }
  } else if (continuity == Continuity::discontinuous) {
    if (order != 1)
      throw std::invalid_argument("build_space: discontinuous spaces support order 0 or 1");
    sp.n_nodes = 3 * mesh.n_triangles();
    sp.node_coords.resize(sp.n_nodes);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      for (int k = 0; k < 3; ++k) {
        const int g = 3 * t + k;
        sp.node_coords[g] = mesh.vertices[mesh.triangles[t][k]];
        sp.tri_nodes[t][k] = g;
      }
    }
  } else {
    const int nv = mesh.n_vertices();
    const auto edges = detail::enumerate_edges(mesh);
    sp.n_nodes = (order == 1) ? nv : nv + static_cast<int>(edges.size());
    sp.node_coords.resize(sp.n_nodes);
    for (int v = 0; v < nv; ++v) sp.node_coords[v] = mesh.vertices[v];

    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int k = 0; k < 3; ++k) sp.tri_nodes[t][k] = tri[k];
      if (order == 2) {
        for (int e = 0; e < 3; ++e) {
          const int a = tri[e], b = tri[(e + 1) % 3];
          const int eid = edges.at(std::minmax(a, b));
          sp.tri_nodes[t][3 + e] = nv + eid;
          sp.node_coords[nv + eid] = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        }
      }
    }

    // Boundary tags propagate from boundary edges to the nodes on them.
    std::vector<std::set<int>> tags(sp.n_nodes);
    if (order == 2) {
      for (const auto& be : mesh.boundary_edges) {
        tags[be.v0].insert(be.tag);
        tags[be.v1].insert(be.tag);
        const int eid = edges.at(std::minmax(be.v0, be.v1));
        tags[nv + eid].insert(be.tag);
      }
    } else {
      for (const auto& be : mesh.boundary_edges) {
        tags[be.v0].insert(be.tag);
        tags[be.v1].insert(be.tag);
      }
    }
    sp.node_tags.resize(sp.n_nodes);
    for (int i = 0; i < sp.n_nodes; ++i)
      sp.node_tags[i].assign(tags[i].begin(), tags[i].end());
  }

  if (sp.node_tags.empty()) sp.node_tags.resize(sp.n_nodes);
  return sp;
}

struct BasisEval {
  int n = 0;
  std::array<double, 6> values{};
  std::array<Vec2, 6> grads{};  // physical gradients
};

// Values and gradients of the local scalar basis at a barycentric point of
// triangle `t`. Gradients use the triangle's affine map, so they are exact
// physical-space gradients.
inline BasisEval eval_basis(const FESpace& sp, int t, const std::array<double, 3>& bary) {
  const double sum = bary[0] + bary[1] + bary[2];
  if (bary[0] < -1e-12 || bary[1] < -1e-12 || bary[2] < -1e-12 ||
      std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("eval_basis: invalid barycentric point");

  const TriMesh& mesh = *sp.mesh;
  const auto& tri = mesh.triangles[t];
  const Vec2 p0 = mesh.vertices[tri[0]];
  const Vec2 p1 = mesh.vertices[tri[1]];
  const Vec2 p2 = mesh.vertices[tri[2]];
  const double twoA = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                      (p1.y() - p0.y()) * (p2.x() - p0.x());

  // Constant gradients of the barycentric coordinates.
  const std::array<Vec2, 3> dl = {
      Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twoA,
      Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / twoA,
      Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / twoA,
  };

  BasisEval out;
  if (sp.order == 0) {
    out.n = 1;
    out.values[0] = 1.0;
    out.grads[0] = Vec2::Zero();
    return out;
  }
  if (sp.order == 1) {
    out.n = 3;
    for (int i = 0; i < 3; ++i) {
      out.values[i] = bary[i];
      out.grads[i] = dl[i];
    }
    return out;
  }
  out.n = 6;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = bary[i] * (2.0 * bary[i] - 1.0);
    out.grads[i] = (4.0 * bary[i] - 1.0) * dl[i];
  }
  for (int e = 0; e < 3; ++e) {
    const int i = e, j = (e + 1) % 3;
    out.values[3 + e] = 4.0 * bary[i] * bary[j];
    out.grads[3 + e] = 4.0 * (bary[i] * dl[j] + bary[j] * dl[i]);
  }
  return out;
}

// All DOFs whose node lies on a boundary edge with one of the given tags.
inline std::vector<int> dirichlet_dofs(const FESpace& sp, const std::vector<int>& tags) {
  if (sp.order == 0 || sp.continuity == Continuity::discontinuous)
    throw std::invalid_argument("dirichlet_dofs: requires a continuous order >= 1 space");
  std::vector<int> dofs;
  for (int n = 0; n < sp.n_nodes; ++n) {
    bool hit = false;
    for (int tag : sp.node_tags[n])
      hit = hit || std::find(tags.begin(), tags.end(), tag) != tags.end();
    if (!hit) continue;
    for (int c = 0; c < sp.arity; ++c) dofs.push_back(sp.dof(n, c));
  }
  return dofs;
}

// Nodal interpolation at time t. For arity 1 `f` maps (Vec2, t) -> double,
// for arity 2 (Vec2, t) -> Vec2.
template <class F>
VecX interpolate(const FESpace& sp, F&& f, double t) {
  VecX coeffs = VecX::Zero(sp.n_dofs());
  for (int n = 0; n < sp.n_nodes; ++n) {
    if constexpr (std::is_convertible_v<std::invoke_result_t<F, Vec2, double>, double>) {
      coeffs[sp.dof(n, 0)] = f(sp.node_coords[n], t);
    } else {
      const Vec2 v = f(sp.node_coords[n], t);
      for (int c = 0; c < sp.arity; ++c) coeffs[sp.dof(n, c)] = v[c];
    }
  }
  return coeffs;
}

// Evaluates the FE field (all components) at a barycentric point.
inline void eval_field(const FESpace& sp, const VecX& coeffs, int t,
                       const std::array<double, 3>& bary, double* out) {
  const BasisEval basis = eval_basis(sp, t, bary);
  for (int c = 0; c < sp.arity; ++c) out[c] = 0.0;
  for (int k = 0; k < basis.n; ++k) {
    const int node = sp.tri_nodes[t][k];
    for (int c = 0; c < sp.arity; ++c)
      out[c] += coeffs[sp.dof(node, c)] * basis.values[k];
  }
}

}  // namespace cda

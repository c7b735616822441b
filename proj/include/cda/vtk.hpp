#pragma once

#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/assemble.hpp"
#include "cda/linalg.hpp"
#include "cda/mesh.hpp"
#include "cda/space.hpp"

namespace cda {

// Field sampled at mesh vertices, ready for VTK point data.
struct VtkField {
  std::string name;
  int arity = 1;
  VecX values;  // n_vertices * arity, interleaved
};

// Vertex-node block of a continuous Lagrange field (vertex nodes come first
// in build_space's numbering).
inline VtkField vertex_field(const std::string& name, const FESpace& sp, const VecX& coeffs) {
  if (sp.order < 1 || sp.continuity != Continuity::continuous)
    throw std::invalid_argument("vertex_field: continuous order >= 1 space required");
  const int nv = sp.mesh->n_vertices();
  VtkField f;
  f.name = name;
  f.arity = sp.arity;
  f.values.resize(nv * sp.arity);
  for (int v = 0; v < nv; ++v)
    for (int c = 0; c < sp.arity; ++c) f.values[v * sp.arity + c] = coeffs[sp.dof(v, c)];
  return f;
}

// Legacy ASCII VTK unstructured grid (triangles, cell type 5) with point data.
inline void write_vtk(const std::string& path, const TriMesh& mesh,
                      const std::vector<VtkField>& fields) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_vtk: cannot open " + path);
  const int nv = mesh.n_vertices();
  const int nt = mesh.n_triangles();

  os << "# vtk DataFile Version 3.0\n";
  os << "cda fields\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(12);
  os << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices) os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";

  os << "POINT_DATA " << nv << '\n';
  for (const auto& f : fields) {
    if (f.values.size() != static_cast<Eigen::Index>(nv) * f.arity)
      throw std::invalid_argument("write_vtk: field " + f.name + " has wrong size");
    if (f.arity == 2) {
      os << "VECTORS " << f.name << " double\n";
      for (int v = 0; v < nv; ++v)
        os << f.values[2 * v] << ' ' << f.values[2 * v + 1] << " 0\n";
    } else {
      os << "SCALARS " << f.name << " double 1\n";
      os << "LOOKUP_TABLE default\n";
      for (int v = 0; v < nv; ++v) os << f.values[v] << '\n';
    }
  }
  if (!os) throw std::runtime_error("write_vtk: write failed for " + path);
}

// Stream function of a velocity field: -Lap psi = curl u (= dx u2 - dy u1)
// with psi = 0 on the whole boundary.
inline VecX stream_function(const FESpace& vel, const VecX& u, const FESpace& psi_sp) {
  detail::check_same_mesh(vel, psi_sp, "stream_function");
  const TriMesh& mesh = *vel.mesh;
  const QuadratureRule& rule = default_quadrature();

  VecX rhs = VecX::Zero(psi_sp.n_dofs());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval ub = eval_basis(vel, t, rule.points[q]);
      const BasisEval pb = eval_basis(psi_sp, t, rule.points[q]);
      double curl = 0.0;
      for (int k = 0; k < ub.n; ++k) {
        const int node = vel.tri_nodes[t][k];
        curl += u[vel.dof(node, 1)] * ub.grads[k].x() - u[vel.dof(node, 0)] * ub.grads[k].y();
      }
      const double wq = rule.weights[q] * a;
      for (int j = 0; j < pb.n; ++j)
        rhs[psi_sp.dof(psi_sp.tri_nodes[t][j], 0)] += wq * curl * pb.values[j];
    }
  }

  SpMat K = assemble_stiffness(psi_sp, 1.0);
  const auto dir = dirichlet_dofs(psi_sp, {kLeft, kRight, kBottom, kTop});
  std::vector<bool> mask(psi_sp.n_dofs(), false);
  for (int d : dir) mask[d] = true;
  std::vector<Triplet> trips;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it)
      if (!mask[it.row()]) trips.emplace_back(it.row(), it.col(), it.value());
  for (int d : dir) {
    trips.emplace_back(d, d, 1.0);
    rhs[d] = 0.0;
  }
  SpMat A(psi_sp.n_dofs(), psi_sp.n_dofs());
  A.setFromTriplets(trips.begin(), trips.end());
  return solve(A, rhs, SolverOptions{});
}

}  // namespace cda

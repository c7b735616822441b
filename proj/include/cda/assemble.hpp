#pragma once

#include <array>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "cda/linalg.hpp"
#include "cda/mesh.hpp"
#include "cda/quadrature.hpp"
#include "cda/space.hpp"

namespace cda {

struct PhysicalParams {
  double nu = 1.0;      // kinematic viscosity
  double inv_Da = 0.0;  // inverse Darcy number, 0 encodes Da = infinity
  double kappa = 1.0;   // thermal diffusivity
  double Dc = 1.0;      // solutal diffusivity
  double beta_T = 1.0;
  double beta_C = 1.0;
  Vec2 gravity = Vec2(0.0, -1.0);

  void validate() const {
    if (!(nu > 0)) throw std::invalid_argument("PhysicalParams: nu must be positive");
    if (!(kappa > 0)) throw std::invalid_argument("PhysicalParams: kappa must be positive");
    if (!(Dc > 0)) throw std::invalid_argument("PhysicalParams: Dc must be positive");
    if (inv_Da < 0) throw std::invalid_argument("PhysicalParams: inv_Da must be nonnegative");
  }
};

namespace detail {

inline Vec2 physical_point(const TriMesh& mesh, int t, const std::array<double, 3>& bary) {
  const auto& tri = mesh.triangles[t];
  return bary[0] * mesh.vertices[tri[0]] + bary[1] * mesh.vertices[tri[1]] +
         bary[2] * mesh.vertices[tri[2]];
}

inline void check_same_mesh(const FESpace& a, const FESpace& b, const char* who) {
  if (a.mesh != b.mesh) throw std::invalid_argument(std::string(who) + ": spaces on different meshes");
}

}  // namespace detail

// M_ij = (phi_j, phi_i), block diagonal over components.
inline SpMat assemble_mass(const FESpace& sp,
                           const QuadratureRule& rule = default_quadrature()) {
  const TriMesh& mesh = *sp.mesh;
  const int nl = sp.n_local_nodes();
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_triangles() * nl * nl * sp.arity);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    std::array<std::array<double, 6>, 6> local{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval basis = eval_basis(sp, t, rule.points[q]);
      const double w = rule.weights[q] * a;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          local[i][j] += w * basis.values[i] * basis.values[j];
    }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        for (int c = 0; c < sp.arity; ++c)
          trips.emplace_back(sp.dof(sp.tri_nodes[t][i], c),
                             sp.dof(sp.tri_nodes[t][j], c), local[i][j]);
  }
  return from_triplets(sp.n_dofs(), sp.n_dofs(), trips);
}

// A_ij = coeff * (grad phi_j, grad phi_i), block diagonal over components.
inline SpMat assemble_stiffness(const FESpace& sp, double coeff,
                                const QuadratureRule& rule = default_quadrature()) {
  if (sp.order < 1) throw std::invalid_argument("assemble_stiffness: order >= 1 required");
  if (!(coeff > 0)) throw std::invalid_argument("assemble_stiffness: coeff must be positive");
  const TriMesh& mesh = *sp.mesh;
  const int nl = sp.n_local_nodes();
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_triangles() * nl * nl * sp.arity);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    std::array<std::array<double, 6>, 6> local{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval basis = eval_basis(sp, t, rule.points[q]);
      const double w = rule.weights[q] * a * coeff;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          local[i][j] += w * basis.grads[i].dot(basis.grads[j]);
    }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        for (int c = 0; c < sp.arity; ++c)
          trips.emplace_back(sp.dof(sp.tri_nodes[t][i], c),
                             sp.dof(sp.tri_nodes[t][j], c), local[i][j]);
  }
  return from_triplets(sp.n_dofs(), sp.n_dofs(), trips);
}

// Appends the triplets of N(w) = (C - C^T)/2 with C_ij = (w . grad phi_j, phi_i).
// Entries are emitted in +/- pairs, so the assembled matrix is antisymmetric to
// machine precision regardless of quadrature.
inline void convection_skew_triplets(const FESpace& sp, const FESpace& wind_sp,
                                     const VecX& w, const QuadratureRule& rule,
                                     std::vector<Triplet>& trips) {
  detail::check_same_mesh(sp, wind_sp, "assemble_convection_skew");
  if (wind_sp.arity != 2)
    throw std::invalid_argument("assemble_convection_skew: wind space must be vector-valued");
  if (w.size() != wind_sp.n_dofs())
    throw std::invalid_argument("assemble_convection_skew: wind coefficient size mismatch");

  const TriMesh& mesh = *sp.mesh;
  const int nl = sp.n_local_nodes();
  const int nlw = wind_sp.n_local_nodes();

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    std::array<std::array<double, 6>, 6> local{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval basis = eval_basis(sp, t, rule.points[q]);
      const BasisEval wbasis = eval_basis(wind_sp, t, rule.points[q]);
      Vec2 wind = Vec2::Zero();
      for (int k = 0; k < nlw; ++k) {
        const int node = wind_sp.tri_nodes[t][k];
        wind.x() += w[wind_sp.dof(node, 0)] * wbasis.values[k];
        wind.y() += w[wind_sp.dof(node, 1)] * wbasis.values[k];
      }
      const double wq = rule.weights[q] * a;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          local[i][j] += wq * wind.dot(basis.grads[j]) * basis.values[i];
    }
    // Pairs are always emitted (even when zero) so the sparsity pattern is
    // independent of the wind; time steppers rely on a stable pattern.
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        const double v = 0.5 * local[i][j];
        for (int c = 0; c < sp.arity; ++c) {
          const int I = sp.dof(sp.tri_nodes[t][i], c);
          const int J = sp.dof(sp.tri_nodes[t][j], c);
          trips.emplace_back(I, J, v);
          trips.emplace_back(J, I, -v);
        }
      }
  }
}

inline SpMat assemble_convection_skew(const FESpace& sp, const FESpace& wind_sp,
                                      const VecX& w,
                                      const QuadratureRule& rule = default_quadrature()) {
  std::vector<Triplet> trips;
  convection_skew_triplets(sp, wind_sp, w, rule, trips);
  SpMat N = from_triplets(sp.n_dofs(), sp.n_dofs(), trips);
  prune_zeros(N);
  return N;
}

// Self-convection N(w) on the velocity space itself.
inline SpMat assemble_convection_skew(const FESpace& sp, const VecX& w,
                                      const QuadratureRule& rule = default_quadrature()) {
  return assemble_convection_skew(sp, sp, w, rule);
}

// B_qi = (q, div phi_i), rows indexed by pressure DOFs.
inline SpMat assemble_divergence(const FESpace& vel_sp, const FESpace& p_sp,
                                 const QuadratureRule& rule = default_quadrature()) {
  detail::check_same_mesh(vel_sp, p_sp, "assemble_divergence");
  if (vel_sp.arity != 2)
    throw std::invalid_argument("assemble_divergence: velocity space must be vector-valued");
  if (p_sp.arity != 1)
    throw std::invalid_argument("assemble_divergence: pressure space must be scalar");

  const TriMesh& mesh = *vel_sp.mesh;
  const int nlu = vel_sp.n_local_nodes();
  const int nlp = p_sp.n_local_nodes();
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_triangles() * nlu * nlp * 2);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    std::array<std::array<std::array<double, 2>, 6>, 6> local{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval ubasis = eval_basis(vel_sp, t, rule.points[q]);
      const BasisEval pbasis = eval_basis(p_sp, t, rule.points[q]);
      const double wq = rule.weights[q] * a;
      for (int i = 0; i < nlp; ++i)
        for (int j = 0; j < nlu; ++j)
          for (int c = 0; c < 2; ++c)
            local[i][j][c] += wq * pbasis.values[i] * ubasis.grads[j][c];
    }
    for (int i = 0; i < nlp; ++i)
      for (int j = 0; j < nlu; ++j)
        for (int c = 0; c < 2; ++c)
          trips.emplace_back(p_sp.dof(p_sp.tri_nodes[t][i], 0),
                             vel_sp.dof(vel_sp.tri_nodes[t][j], c), local[i][j][c]);
  }
  return from_triplets(p_sp.n_dofs(), vel_sp.n_dofs(), trips);
}

// f_i = ((beta_T T + beta_C S) g, phi_i) on the velocity space.
inline VecX assemble_buoyancy_rhs(const FESpace& vel_sp, const FESpace& scalar_sp,
                                  const VecX& T, const VecX& S, const PhysicalParams& params,
                                  const QuadratureRule& rule = default_quadrature()) {
  detail::check_same_mesh(vel_sp, scalar_sp, "assemble_buoyancy_rhs");
  if (T.size() != scalar_sp.n_dofs() || S.size() != scalar_sp.n_dofs())
    throw std::invalid_argument("assemble_buoyancy_rhs: coefficient size mismatch");

  const TriMesh& mesh = *vel_sp.mesh;
  const int nlu = vel_sp.n_local_nodes();
  const int nls = scalar_sp.n_local_nodes();
  VecX f = VecX::Zero(vel_sp.n_dofs());

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval ubasis = eval_basis(vel_sp, t, rule.points[q]);
      const BasisEval sbasis = eval_basis(scalar_sp, t, rule.points[q]);
      double Tq = 0.0, Sq = 0.0;
      for (int k = 0; k < nls; ++k) {
        const int node = scalar_sp.tri_nodes[t][k];
        Tq += T[scalar_sp.dof(node, 0)] * sbasis.values[k];
        Sq += S[scalar_sp.dof(node, 0)] * sbasis.values[k];
      }
      const double buoy = params.beta_T * Tq + params.beta_C * Sq;
      const double wq = rule.weights[q] * a;
      for (int j = 0; j < nlu; ++j) {
        const int node = vel_sp.tri_nodes[t][j];
        for (int c = 0; c < 2; ++c)
          f[vel_sp.dof(node, c)] += wq * buoy * params.gravity[c] * ubasis.values[j];
      }
    }
  }
  return f;
}

// L2 load vector (f(.,t), phi_i). For scalar spaces f returns double, for
// vector spaces Vec2.
template <class F>
VecX assemble_load(const FESpace& sp, F&& f, double t,
                   const QuadratureRule& rule = default_quadrature()) {
  const TriMesh& mesh = *sp.mesh;
  const int nl = sp.n_local_nodes();
  VecX out = VecX::Zero(sp.n_dofs());

  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const double a = mesh.area(tri);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval basis = eval_basis(sp, tri, rule.points[q]);
      const Vec2 x = detail::physical_point(mesh, tri, rule.points[q]);
      const double wq = rule.weights[q] * a;
      if constexpr (std::is_convertible_v<std::invoke_result_t<F, Vec2, double>, double>) {
        const double fv = f(x, t);
        for (int j = 0; j < nl; ++j)
          out[sp.dof(sp.tri_nodes[tri][j], 0)] += wq * fv * basis.values[j];
      } else {
        const Vec2 fv = f(x, t);
        for (int j = 0; j < nl; ++j)
          for (int c = 0; c < 2; ++c)
            out[sp.dof(sp.tri_nodes[tri][j], c)] += wq * fv[c] * basis.values[j];
      }
    }
  }
  return out;
}

// Constant operators of one run. N(w) is rebuilt per step by the stepper;
// nudging stays in factorized form (see ObservationOperator).
struct SystemOperators {
  SpMat M;  // mass
  SpMat A;  // stiffness scaled by the diffusion coefficient
  SpMat D;  // divergence (velocity systems only)
};

}  // namespace cda

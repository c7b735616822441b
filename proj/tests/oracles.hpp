// Brute-force reference implementations used to pin the sparse assembly.
// Everything here is dense, slow, and written independently of the library
// code paths: direct quadrature loops into Eigen::MatrixXd.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "cda/assemble.hpp"
#include "cda/observe.hpp"
#include "cda/space.hpp"

namespace oracle {

using cda::FESpace;
using cda::QuadratureRule;
using cda::Vec2;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline Vec2 point_of(const cda::TriMesh& mesh, int t, const std::array<double, 3>& b) {
  const auto& tri = mesh.triangles[t];
  return b[0] * mesh.vertices[tri[0]] + b[1] * mesh.vertices[tri[1]] +
         b[2] * mesh.vertices[tri[2]];
}

inline MatrixXd dense_mass(const FESpace& sp, const QuadratureRule& rule) {
  MatrixXd M = MatrixXd::Zero(sp.n_dofs(), sp.n_dofs());
  for (int t = 0; t < sp.mesh->n_triangles(); ++t) {
    const double area = sp.mesh->area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto basis = eval_basis(sp, t, rule.points[q]);
      const double w = rule.weights[q] * area;
      for (int i = 0; i < basis.n; ++i)
        for (int j = 0; j < basis.n; ++j)
          for (int c = 0; c < sp.arity; ++c)
            M(sp.dof(sp.tri_nodes[t][i], c), sp.dof(sp.tri_nodes[t][j], c)) +=
                w * basis.values[i] * basis.values[j];
    }
  }
  return M;
}

inline MatrixXd dense_stiffness(const FESpace& sp, double coeff,
                                const QuadratureRule& rule) {
  MatrixXd A = MatrixXd::Zero(sp.n_dofs(), sp.n_dofs());
  for (int t = 0; t < sp.mesh->n_triangles(); ++t) {
    const double area = sp.mesh->area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto basis = eval_basis(sp, t, rule.points[q]);
      const double w = coeff * rule.weights[q] * area;
      for (int i = 0; i < basis.n; ++i)
        for (int j = 0; j < basis.n; ++j)
          for (int c = 0; c < sp.arity; ++c)
            A(sp.dof(sp.tri_nodes[t][i], c), sp.dof(sp.tri_nodes[t][j], c)) +=
                w * basis.grads[i].dot(basis.grads[j]);
    }
  }
  return A;
}

// c_ij = integral of (w . grad phi_j) phi_i, then skew-symmetrized.
inline MatrixXd dense_convection_skew(const FESpace& sp, const FESpace& wind_sp,
                                      const VectorXd& w, const QuadratureRule& rule) {
  MatrixXd C = MatrixXd::Zero(sp.n_dofs(), sp.n_dofs());
  for (int t = 0; t < sp.mesh->n_triangles(); ++t) {
    const double area = sp.mesh->area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto basis = eval_basis(sp, t, rule.points[q]);
      const auto wind_basis = eval_basis(wind_sp, t, rule.points[q]);
      Vec2 wq = Vec2::Zero();
      for (int k = 0; k < wind_basis.n; ++k)
        for (int c = 0; c < 2; ++c)
          wq[c] += w[wind_sp.dof(wind_sp.tri_nodes[t][k], c)] * wind_basis.values[k];
      const double wt = rule.weights[q] * area;
      for (int i = 0; i < basis.n; ++i)
        for (int j = 0; j < basis.n; ++j)
          for (int c = 0; c < sp.arity; ++c)
            C(sp.dof(sp.tri_nodes[t][i], c), sp.dof(sp.tri_nodes[t][j], c)) +=
                wt * wq.dot(basis.grads[j]) * basis.values[i];
    }
  }
  return 0.5 * (C - C.transpose());
}

inline MatrixXd dense_divergence(const FESpace& vel, const FESpace& pres,
                                 const QuadratureRule& rule) {
  MatrixXd B = MatrixXd::Zero(pres.n_dofs(), vel.n_dofs());
  for (int t = 0; t < vel.mesh->n_triangles(); ++t) {
    const double area = vel.mesh->area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto vb = eval_basis(vel, t, rule.points[q]);
      const auto pb = eval_basis(pres, t, rule.points[q]);
      const double w = rule.weights[q] * area;
      for (int iq = 0; iq < pb.n; ++iq)
        for (int j = 0; j < vb.n; ++j)
          for (int c = 0; c < 2; ++c)
            B(pres.dof(pres.tri_nodes[t][iq], 0), vel.dof(vel.tri_nodes[t][j], c)) +=
                w * pb.values[iq] * vb.grads[j][c];
    }
  }
  return B;
}

// Dense interpolant matrix: row (cell, comp) holds cell averages of the basis
// functions. Assumes mesh triangles do not straddle coarse cells, so binning
// by barycenter is exact; valid for structured meshes with H a multiple of h.
inline MatrixXd dense_interpolant(const FESpace& sp, const cda::CoarseGrid& grid,
                                  const QuadratureRule& rule) {
  MatrixXd P = MatrixXd::Zero(grid.n_cells() * sp.arity, sp.n_dofs());
  VectorXd measure = VectorXd::Zero(grid.n_cells());
  for (int t = 0; t < sp.mesh->n_triangles(); ++t) {
    const double area = sp.mesh->area(t);
    const int cell = locate_cell(grid, sp.mesh->barycenter(t));
    measure[cell] += area;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto basis = eval_basis(sp, t, rule.points[q]);
      const double w = rule.weights[q] * area;
      for (int j = 0; j < basis.n; ++j)
        for (int c = 0; c < sp.arity; ++c)
          P(cell * sp.arity + c, sp.dof(sp.tri_nodes[t][j], c)) += w * basis.values[j];
    }
  }
  for (int cell = 0; cell < grid.n_cells(); ++cell)
    for (int c = 0; c < sp.arity; ++c) P.row(cell * sp.arity + c) /= measure[cell];
  return P;
}

// Central differences for the PDE residual checks.
template <class F>
double fd_dx(F f, const Vec2& x, double t, double h = 1e-5) {
  return (f(Vec2(x.x() + h, x.y()), t) - f(Vec2(x.x() - h, x.y()), t)) / (2 * h);
}
template <class F>
double fd_dy(F f, const Vec2& x, double t, double h = 1e-5) {
  return (f(Vec2(x.x(), x.y() + h), t) - f(Vec2(x.x(), x.y() - h), t)) / (2 * h);
}
template <class F>
double fd_dt(F f, const Vec2& x, double t, double h = 1e-5) {
  return (f(x, t + h) - f(x, t - h)) / (2 * h);
}
template <class F>
double fd_laplace(F f, const Vec2& x, double t, double h = 1e-4) {
  return (f(Vec2(x.x() + h, x.y()), t) + f(Vec2(x.x() - h, x.y()), t) +
          f(Vec2(x.x(), x.y() + h), t) + f(Vec2(x.x(), x.y() - h), t) -
          4 * f(x, t)) /
         (h * h);
}

// Zero-boundary solution of -lap(psi) = 2 on the unit square.
inline double series_poisson2(double x, double y) {
  const double pi = 3.14159265358979323846;
  double sum = 0.0;
  for (int m = 1; m <= 99; m += 2)
    for (int n = 1; n <= 99; n += 2)
      sum += 32.0 / (std::pow(pi, 4) * m * n * (m * m + n * n)) * std::sin(m * pi * x) *
             std::sin(n * pi * y);
  return sum;
}

inline VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace oracle

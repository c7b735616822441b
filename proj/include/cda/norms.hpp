#pragma once

#include <cmath>
#include <type_traits>

#include "cda/assemble.hpp"
#include "cda/quadrature.hpp"
#include "cda/space.hpp"

namespace cda {

// L2 norm of an FE field by element quadrature.
inline double l2_norm(const FESpace& sp, const VecX& coeffs,
                      const QuadratureRule& rule = tri_quadrature_degree6()) {
  const TriMesh& mesh = *sp.mesh;
  double acc = 0.0;
  double vals[2];
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      eval_field(sp, coeffs, t, rule.points[q], vals);
      double s = 0.0;
      for (int c = 0; c < sp.arity; ++c) s += vals[c] * vals[c];
      acc += rule.weights[q] * a * s;
    }
  }
  return std::sqrt(acc);
}

// ||u_h - exact(., t)||_{L2}. `exact` returns double for scalar spaces, Vec2
// for vector spaces.
template <class F>
double l2_error(const FESpace& sp, const VecX& coeffs, F&& exact, double t,
                const QuadratureRule& rule = tri_quadrature_degree6()) {
  const TriMesh& mesh = *sp.mesh;
  double acc = 0.0;
  double vals[2];
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const double a = mesh.area(tri);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      eval_field(sp, coeffs, tri, rule.points[q], vals);
      const Vec2 x = detail::physical_point(mesh, tri, rule.points[q]);
      double s = 0.0;
      if constexpr (std::is_convertible_v<std::invoke_result_t<F, Vec2, double>, double>) {
        const double d = vals[0] - exact(x, t);
        s = d * d;
      } else {
        const Vec2 e = exact(x, t);
        for (int c = 0; c < 2; ++c) {
          const double d = vals[c] - e[c];
          s += d * d;
        }
      }
      acc += rule.weights[q] * a * s;
    }
  }
  return std::sqrt(acc);
}

}  // namespace cda

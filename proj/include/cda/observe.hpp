#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/assemble.hpp"
#include "cda/linalg.hpp"
#include "cda/mesh.hpp"
#include "cda/quadrature.hpp"
#include "cda/space.hpp"

namespace cda {

// L2 projection I_H onto piecewise constants of a uniform rectangular coarse
// grid. P maps fine coefficients to cell averages (one row per cell and
// component, row = cell*arity + comp); W holds the cell measures. Fine
// integrals are accumulated by binning fine-element quadrature points into
// coarse cells, so triangles straddling a cell boundary split at quadrature
// resolution.
struct ObservationOperator {
  CoarseGrid grid;
  const FESpace* space = nullptr;
  SpMat P;
  VecX cell_measures;  // one entry per scalar cell
  QuadratureRule rule;

  int n_obs() const { return static_cast<int>(P.rows()); }
};

inline ObservationOperator build_observation_operator(
    const FESpace& sp, double H, const QuadratureRule& rule = default_quadrature()) {
  const TriMesh& mesh = *sp.mesh;
  if (H < mesh.h_max)
    std::cerr << "build_observation_operator: coarse size H=" << H
              << " finer than mesh h=" << mesh.h_max << "\n";

  ObservationOperator op;
  op.grid = make_coarse_grid(mesh.bounding_box(), H);
  op.space = &sp;
  op.rule = rule;

  const int nc = op.grid.n_cells();
  const int arity = sp.arity;
  const int nl = sp.n_local_nodes();
  VecX measures = VecX::Zero(nc);
  std::vector<Triplet> trips;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double a = mesh.area(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = detail::physical_point(mesh, t, rule.points[q]);
      const int cell = locate_cell(op.grid, x);
      const double wq = rule.weights[q] * a;
      measures[cell] += wq;
      const BasisEval basis = eval_basis(sp, t, rule.points[q]);
      for (int j = 0; j < nl; ++j) {
        const int node = sp.tri_nodes[t][j];
        for (int c = 0; c < arity; ++c)
          trips.emplace_back(cell * arity + c, sp.dof(node, c), wq * basis.values[j]);
      }
    }
  }

  for (int c = 0; c < nc; ++c)
    if (!(measures[c] > 0))
      throw std::runtime_error("build_observation_operator: coarse cell " +
                               std::to_string(c) + " has no quadrature overlap");

  // Raw rows hold integrals; divide by cell measure to get averages.
  op.P = from_triplets(nc * arity, sp.n_dofs(), trips);
  for (int k = 0; k < op.P.outerSize(); ++k)
    for (SpMat::InnerIterator it(op.P, k); it; ++it)
      it.valueRef() /= measures[it.row() / arity];
  op.cell_measures = measures;
  return op;
}

inline VecX observe(const ObservationOperator& op, const VecX& coeffs) {
  if (coeffs.size() != op.P.cols())
    throw std::invalid_argument("observe: coefficient size mismatch");
  return op.P * coeffs;
}

// Cell averages of an analytic field, via the operator's own quadrature
// binning (consistent with `observe` of an interpolant up to FE error).
template <class F>
VecX project_function(const ObservationOperator& op, F&& f, double t) {
  const FESpace& sp = *op.space;
  const TriMesh& mesh = *sp.mesh;
  const int arity = sp.arity;
  VecX acc = VecX::Zero(op.grid.n_cells() * arity);

  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const double a = mesh.area(tri);
    for (std::size_t q = 0; q < op.rule.points.size(); ++q) {
      const Vec2 x = detail::physical_point(mesh, tri, op.rule.points[q]);
      const int cell = locate_cell(op.grid, x);
      const double wq = op.rule.weights[q] * a;
      if constexpr (std::is_convertible_v<std::invoke_result_t<F, Vec2, double>, double>) {
        acc[cell] += wq * f(x, t);
      } else {
        const Vec2 v = f(x, t);
        for (int c = 0; c < arity; ++c) acc[cell * arity + c] += wq * v[c];
      }
    }
  }
  for (int cell = 0; cell < op.grid.n_cells(); ++cell)
    for (int c = 0; c < arity; ++c) acc[cell * arity + c] /= op.cell_measures[cell];
  return acc;
}

// mu * P^T W P. Returned explicitly for verification; the stepper keeps the
// factors separate (bordered system) so this product never enters a
// factorization.
inline SpMat assemble_nudging(const FESpace& sp, const ObservationOperator& op, double mu) {
  if (mu < 0) throw std::invalid_argument("assemble_nudging: mu must be nonnegative");
  if (op.space != &sp)
    throw std::invalid_argument("assemble_nudging: operator built on a different space");
  const int n = sp.n_dofs();
  if (mu == 0) return SpMat(n, n);

  VecX wdiag(op.P.rows());
  for (int row = 0; row < op.P.rows(); ++row)
    wdiag[row] = op.cell_measures[row / sp.arity];
  SpMat G = op.P.transpose() * (mu * wdiag.asDiagonal() * op.P).eval();
  G.makeCompressed();
  return G;
}

// Coarse observations of all variables at one time level.
struct CoarseData {
  VecX u;  // 2 components per cell, interleaved
  VecX T;
  VecX S;
};

// Recorded coarse data at t^{n+1} = (n+1)*dt for n = 0..n_levels-1.
struct ObservationStream {
  double H = 0.0;
  double dt = 0.0;
  CoarseGrid grid;
  std::vector<CoarseData> levels;

  int n_levels() const { return static_cast<int>(levels.size()); }
};

inline CoarseData sample_reference(const ObservationStream& stream, int n) {
  if (n < 0 || n >= stream.n_levels())
    throw std::out_of_range("sample_reference: missing time level " + std::to_string(n));
  return stream.levels[n];
}

namespace detail {

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

inline void write_vec(std::ostream& os, const VecX& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * v.size()));
}

inline void read_vec(std::istream& is, VecX& v, std::int64_t n) {
  v.resize(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
}

}  // namespace detail

inline void save_stream(const ObservationStream& stream, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_stream: cannot open " + path);
  os.write("CDAOBS01", 8);
  detail::write_pod(os, static_cast<std::int32_t>(stream.grid.nx));
  detail::write_pod(os, static_cast<std::int32_t>(stream.grid.ny));
  detail::write_pod(os, stream.grid.origin.x());
  detail::write_pod(os, stream.grid.origin.y());
  detail::write_pod(os, stream.grid.cell_size.x());
  detail::write_pod(os, stream.grid.cell_size.y());
  detail::write_pod(os, stream.H);
  detail::write_pod(os, stream.dt);
  detail::write_pod(os, static_cast<std::int64_t>(stream.levels.size()));
  for (const auto& lvl : stream.levels) {
    detail::write_vec(os, lvl.u);
    detail::write_vec(os, lvl.T);
    detail::write_vec(os, lvl.S);
  }
  if (!os) throw std::runtime_error("save_stream: write failed for " + path);
}

inline ObservationStream load_stream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_stream: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "CDAOBS01", 8) != 0)
    throw std::runtime_error("load_stream: bad magic in " + path);

  ObservationStream stream;
  std::int32_t nx = 0, ny = 0;
  detail::read_pod(is, nx);
  detail::read_pod(is, ny);
  detail::read_pod(is, stream.grid.origin.x());
  detail::read_pod(is, stream.grid.origin.y());
  detail::read_pod(is, stream.grid.cell_size.x());
  detail::read_pod(is, stream.grid.cell_size.y());
  detail::read_pod(is, stream.H);
  detail::read_pod(is, stream.dt);
  stream.grid.nx = nx;
  stream.grid.ny = ny;
  stream.grid.cell_measures.assign(
      static_cast<std::size_t>(nx) * ny,
      stream.grid.cell_size.x() * stream.grid.cell_size.y());
  std::int64_t n_levels = 0;
  detail::read_pod(is, n_levels);
  if (!is || n_levels < 0) throw std::runtime_error("load_stream: corrupt header");

  const std::int64_t nc = static_cast<std::int64_t>(nx) * ny;
  stream.levels.resize(n_levels);
  for (auto& lvl : stream.levels) {
    detail::read_vec(is, lvl.u, 2 * nc);
    detail::read_vec(is, lvl.T, nc);
    detail::read_vec(is, lvl.S, nc);
  }
  if (!is) throw std::runtime_error("load_stream: truncated file " + path);
  return stream;
}

// Supplies coarse data for step n (observation time t^{n+1}).
using ObservationSource = std::function<CoarseData(int n, double t_next)>;

// Projects closed-form fields at each requested time.
template <class FU, class FT, class FS>
ObservationSource manufactured_source(const ObservationOperator& op_u,
                                      const ObservationOperator& op_s, FU fu, FT ft, FS fs) {
  return [&op_u, &op_s, fu, ft, fs](int, double t) {
    CoarseData d;
    d.u = project_function(op_u, fu, t);
    d.T = project_function(op_s, ft, t);
    d.S = project_function(op_s, fs, t);
    return d;
  };
}

inline ObservationSource stream_source(const ObservationStream& stream) {
  return [&stream](int n, double) { return sample_reference(stream, n); };
}

}  // namespace cda

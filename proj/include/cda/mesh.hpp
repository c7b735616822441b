#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cda {

using Vec2 = Eigen::Vector2d;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// Boundary tags: 1=left, 2=right, 3=bottom, 4=top.
enum BoundaryTag : int { kLeft = 1, kRight = 2, kBottom = 3, kTop = 4 };

struct BoundaryEdge {
  int v0, v1;
  int tag;
};

// Conforming triangulation, counter-clockwise triangles, immutable after
// construction.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double h_max = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  double signed_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }

  double area(int t) const { return std::abs(signed_area(t)); }

  Vec2 barycenter(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  double total_area() const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t) a += area(t);
    return a;
  }

  Rect bounding_box() const {
    Rect r{vertices[0].x(), vertices[0].y(), vertices[0].x(), vertices[0].y()};
    for (const auto& v : vertices) {
      r.x0 = std::min(r.x0, v.x());
      r.y0 = std::min(r.y0, v.y());
      r.x1 = std::max(r.x1, v.x());
      r.y1 = std::max(r.y1, v.y());
    }
    return r;
  }
};

inline double longest_edge(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  double len = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 d = mesh.vertices[tri[(e + 1) % 3]] - mesh.vertices[tri[e]];
    len = std::max(len, d.norm());
  }
  return len;
}

inline double compute_h_max(const TriMesh& mesh) {
  double h = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    h = std::max(h, longest_edge(mesh, t));
  return h;
}

// Structured triangulation of an axis-aligned rectangle: each grid cell is
// split along its SW-NE diagonal, n subdivisions per unit length.
inline TriMesh build_structured(const Rect& rect, int n) {
  if (n < 1) throw std::invalid_argument("build_structured: n must be >= 1");
  if (rect.width() <= 0.0 || rect.height() <= 0.0)
    throw std::invalid_argument("build_structured: degenerate rectangle");

  const int nx = std::max(1, static_cast<int>(std::lround(n * rect.width())));
  const int ny = std::max(1, static_cast<int>(std::lround(n * rect.height())));
  const double hx = rect.width() / nx;
  const double hy = rect.height() / ny;

  TriMesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(rect.x0 + i * hx, rect.y0 + j * hy);

  auto vid = [nx](int i, int j) { return i + j * (nx + 1); };

  mesh.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j);
      const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }

  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({vid(0, j + 1), vid(0, j), kLeft});
    mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), kRight});
  }
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), kBottom});
    mesh.boundary_edges.push_back({vid(i + 1, ny), vid(i, ny), kTop});
  }

  mesh.h_max = compute_h_max(mesh);
  return mesh;
}

// Splits every triangle into 3 children sharing its barycenter. Parent edges
// are untouched, so a conforming input stays conforming.
inline TriMesh barycentric_refine(const TriMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  out.vertices.reserve(mesh.n_vertices() + mesh.n_triangles());
  out.triangles.reserve(3 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int g = static_cast<int>(out.vertices.size());
    out.vertices.push_back(mesh.barycenter(t));
    const auto& tri = mesh.triangles[t];
    out.triangles.push_back({tri[0], tri[1], g});
    out.triangles.push_back({tri[1], tri[2], g});
    out.triangles.push_back({tri[2], tri[0], g});
  }
  out.boundary_edges = mesh.boundary_edges;
  out.h_max = compute_h_max(out);
  return out;
}

// Uniform rectangular grid of observation cells tiling a bounding box.
struct CoarseGrid {
  Vec2 origin;
  Vec2 cell_size;
  int nx = 0, ny = 0;
  std::vector<double> cell_measures;

  int n_cells() const { return nx * ny; }
  int index(int i, int j) const { return i + j * nx; }
};

inline CoarseGrid make_coarse_grid(const Rect& rect, double H) {
  if (H <= 0.0) throw std::invalid_argument("make_coarse_grid: H must be positive");
  CoarseGrid grid;
  grid.origin = Vec2(rect.x0, rect.y0);
  grid.nx = std::max(1, static_cast<int>(std::lround(rect.width() / H)));
  grid.ny = std::max(1, static_cast<int>(std::lround(rect.height() / H)));
  grid.cell_size = Vec2(rect.width() / grid.nx, rect.height() / grid.ny);
  grid.cell_measures.assign(grid.n_cells(), grid.cell_size.x() * grid.cell_size.y());
  return grid;
}

// Half-open cells; points on the domain's max faces belong to the last cell.
inline int locate_cell(const CoarseGrid& grid, const Vec2& p) {
  constexpr double tol = 1e-12;
  const double rx = (p.x() - grid.origin.x()) / grid.cell_size.x();
  const double ry = (p.y() - grid.origin.y()) / grid.cell_size.y();
  if (rx < -tol || ry < -tol || rx > grid.nx + tol || ry > grid.ny + tol)
    throw std::out_of_range("locate_cell: point outside domain");
  int i = static_cast<int>(std::floor(rx));
  int j = static_cast<int>(std::floor(ry));
  i = std::clamp(i, 0, grid.nx - 1);
  j = std::clamp(j, 0, grid.ny - 1);
  return grid.index(i, j);
}

}  // namespace cda

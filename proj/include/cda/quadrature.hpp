#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace cda {

// Symmetric quadrature on the reference triangle. Points are barycentric,
// weights sum to one; physical integrals multiply by the triangle area.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

inline QuadratureRule make_rule_degree2() {
  QuadratureRule r;
  r.degree = 2;
  r.points = {{{0.5, 0.5, 0.0}}, {{0.0, 0.5, 0.5}}, {{0.5, 0.0, 0.5}}};
  r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return r;
}

inline QuadratureRule make_rule_degree5() {
  QuadratureRule r;
  r.degree = 5;
  const double a = (6.0 + std::sqrt(15.0)) / 21.0;
  const double b = (6.0 - std::sqrt(15.0)) / 21.0;
  const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
  const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(9.0 / 40.0);
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> pa{a, a, a}, pb{b, b, b};
    pa[i] = 1.0 - 2.0 * a;
    pb[i] = 1.0 - 2.0 * b;
    r.points.push_back(pa);
    r.weights.push_back(wa);
    r.points.push_back(pb);
    r.weights.push_back(wb);
  }
  return r;
}

// Dunavant 12-point rule, used where extra headroom over degree 5 is wanted
// (error norms against non-polynomial fields).
inline QuadratureRule make_rule_degree6() {
  QuadratureRule r;
  r.degree = 6;
  const double a1 = 0.873821971016996, b1 = 0.063089014491502;
  const double a2 = 0.501426509658179, b2 = 0.249286745170910;
  const double a3 = 0.636502499121399, b3 = 0.310352451033785,
               c3 = 0.053145049844816;
  const double w1 = 0.050844906370207;
  const double w2 = 0.116786275726379;
  const double w3 = 0.082851075618374;
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> p1{b1, b1, b1}, p2{b2, b2, b2};
    p1[i] = a1;
    p2[i] = a2;
    r.points.push_back(p1);
    r.weights.push_back(w1);
    r.points.push_back(p2);
    r.weights.push_back(w2);
  }
  const std::array<std::array<double, 3>, 6> perms = {{{a3, b3, c3},
                                                       {a3, c3, b3},
                                                       {b3, a3, c3},
                                                       {b3, c3, a3},
                                                       {c3, a3, b3},
                                                       {c3, b3, a3}}};
  for (const auto& p : perms) {
    r.points.push_back(p);
    r.weights.push_back(w3);
  }
  return r;
}

}  // namespace detail

inline const QuadratureRule& tri_quadrature_degree2() {
  static const QuadratureRule rule = detail::make_rule_degree2();
  return rule;
}

inline const QuadratureRule& tri_quadrature_degree5() {
  static const QuadratureRule rule = detail::make_rule_degree5();
  return rule;
}

inline const QuadratureRule& tri_quadrature_degree6() {
  static const QuadratureRule rule = detail::make_rule_degree6();
  return rule;
}

// Default rule for all bilinear/trilinear form assembly.
inline const QuadratureRule& default_quadrature() { return tri_quadrature_degree5(); }

}  // namespace cda

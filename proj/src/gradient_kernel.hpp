#pragma once

#include <cmath>

#include "bem2d/kernel.hpp"
#include "bem2d/quadrature.hpp"

namespace bem2d::detail {

struct SourcePanel {
  Vec2 a, b, d;  // end points and b - a
  Vec2 m, u, n;
  double c = 0.0, h = 0.0;

  SourcePanel() = default;
  explicit SourcePanel(const Segment& s) : a(s.a), b(s.b), d(s.b - s.a), m(s.midpoint()), u(s.tangent()), n(s.normal()) {
    h = s.length();
    c = 0.5 * h;
  }
};

// t . grad_x int_B log|x-y| ds_y (without the -1/2pi factor), x not on B.
inline double log_tangent_derivative(const SourcePanel& p, Vec2 x, Vec2 t, int order_scale) {
  const Vec2 r = x - p.m;
  const double dist = std::sqrt(dot(r, r)) - p.c;
  if (const int m = gradient_far_order(dist, p.h, order_scale); m > 0) {
    const QuadratureRule& g = gauss_legendre(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const Vec2 ri = x - (p.a + g.nodes[static_cast<std::size_t>(i)] * p.d);
      sum += g.weights[static_cast<std::size_t>(i)] * dot(t, ri) / dot(ri, ri);
    }
    return p.h * sum;
  }
  // ds = log(|x-a|/|x-b|), dn = angle subtended by the panel; (u, n) is left-handed
  const Vec2 ra = x - p.a, rb = x - p.b;
  const double a2 = dot(ra, ra), b2 = dot(rb, rb);
  const double s = dot(r, p.u), dd = dot(r, p.n);
  const double ds = std::abs(4.0 * s * p.c) < 0.5 * b2 ? 0.5 * std::log1p(4.0 * s * p.c / b2) : 0.5 * std::log(a2 / b2);
  const double dn = dd == 0.0 ? 0.0 : std::atan2(cross(rb, ra), dot(ra, rb));
  return dot(t, p.u) * ds + dot(t, p.n) * dn;
}

}  // namespace bem2d::detail

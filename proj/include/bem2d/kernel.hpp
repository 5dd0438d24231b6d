#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "bem2d/geometry.hpp"
#include "bem2d/mesh.hpp"

namespace bem2d {

inline constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

struct QuadratureOptions {
  int outer_order = 16;     // Galerkin entries: outer Gauss order in the near field
  int data_order = 16;      // right-hand side, double layer and exact-solution integrals
  int estimator_order = 8;  // nodes per element for the estimator integral
  friend bool operator==(const QuadratureOptions&, const QuadratureOptions&) = default;
};

// Segment in local coordinates around its midpoint.
struct PanelFrame {
  Vec2 m;
  Vec2 u;  // unit tangent
  double c;  // half length

  explicit PanelFrame(const Segment& s) : m(s.midpoint()), u(s.tangent()), c(0.5 * s.length()) {}
};

// int_B log|x - y| ds_y in closed form, valid for every x (including x on B).
double log_potential(const Segment& b, Vec2 x);

// Gradient in x of log_potential. Off the closed segment B; for x on the
// carrier line outside B the normal part vanishes. On B itself the normal
// part is set to its principal value 0.
Vec2 log_potential_gradient(const Segment& b, Vec2 x);

// Single-layer potential of the unit density on B: int_B G(x-y) ds_y.
inline double slp_potential(const Segment& b, Vec2 x) { return -kInvTwoPi * log_potential(b, x); }

// Galerkin entry int_A int_B G(x-y) ds_y ds_x. Symmetric in (A,B) bit for bit.
double slp_entry(const Segment& a, const Segment& b, int outer_order = 16);

// d/ds of the single layer of chi_B at x along the unit direction t, for x not on
// B. Chooses Gauss order by distance, falling back to the closed form nearby.
double slp_tangent_derivative(const Segment& b, Vec2 x, Vec2 t, int order_scale = 8);

// Self-panel principal value: tangential derivative of the single layer of
// chi_T at arclength s in (0,h) measured from the panel's start.
inline double slp_self_tangent_derivative(double h, double s) { return -kInvTwoPi * std::log(s / (h - s)); }

// (V psi)(x) for psi = sum coeffs[k] chi_k.
double slp_eval(const Mesh& mesh, std::span<const double> coeffs, Vec2 x);

// (V psi)'(x) along tangent, x strictly inside element `panel`.
double slp_grad_eval(const Mesh& mesh, std::span<const double> coeffs, int panel, Vec2 x, Vec2 tangent,
                     int order_scale = 8);

// <V phi_E, phi_E> for the Haar function of a node with neighbours plus/minus.
double haar_energy(const Segment& plus, const Segment& minus, int outer_order = 16);
double haar_energy(const Mesh& mesh, const Node& node, int outer_order = 16);

// Gauss order for a far-field source of length h seen from distance dist
// (lower bound); 0 means use the closed form. Targets relative 1e-10 at
// order_scale 8.
inline int gradient_far_order(double dist, double h, int order_scale) {
  int m;
  if (dist >= 79.0 * h)
    m = 2;
  else if (dist >= 11.5 * h)
    m = 3;
  else if (dist >= 4.5 * h)
    m = 4;
  else if (dist >= 1.7 * h)
    m = 6;
  else
    return 0;
  return order_scale == 8 ? m : (m * order_scale + 7) / 8;
}

}  // namespace bem2d

#include "bem2d/kernel.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "bem2d/errors.hpp"
#include "bem2d/quadrature.hpp"
#include "gradient_kernel.hpp"

namespace bem2d {

namespace {

struct Local {
  double s, d, c;
};

Local to_local(const Segment& b, Vec2 x) {
  const PanelFrame f(b);
  const Vec2 r = x - f.m;
  return {dot(r, f.u), dot(r, Vec2{f.u.y, -f.u.x}), f.c};
}

// Phi(z) = z^2/2 log|z| - 3 z^2/4; fourth difference gives the collinear double integral.
double phi_collinear(double z) {
  if (z == 0.0) return 0.0;
  return 0.5 * z * z * std::log(std::abs(z)) - 0.75 * z * z;
}

bool lexicographically_smaller(const Segment& p, const Segment& q) {
  const double hp = p.length(), hq = q.length();
  return std::tie(hp, p.a.x, p.a.y, p.b.x, p.b.y) < std::tie(hq, q.a.x, q.a.y, q.b.x, q.b.y);
}

double outer_gauss(const Segment& piece, const Segment& inner, int order) {
  const QuadratureRule& g = gauss_legendre(order);
  const Vec2 d = piece.b - piece.a;
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) sum += g.weights[i] * log_potential(inner, piece.a + g.nodes[i] * d);
  return piece.length() * sum;
}

// int_piece int_inner log|x-y|, refining the outer piece towards the inner panel.
double outer_recursive(const Segment& piece, const Segment& inner, int order, int depth) {
  const double len = piece.length();
  if (depth >= 50 || distance(piece, inner) >= 0.5 * len) return outer_gauss(piece, inner, order);
  const Vec2 m = piece.midpoint();
  return outer_recursive({piece.a, m}, inner, order, depth + 1) + outer_recursive({m, piece.b}, inner, order, depth + 1);
}

double far_tensor(const Segment& a, const Segment& b, int m) {
  const QuadratureRule& g = gauss_legendre(m);
  const Vec2 da = a.b - a.a, db = b.b - b.a;
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const Vec2 x = a.a + g.nodes[i] * da;
    double inner = 0.0;
    for (int j = 0; j < g.size(); ++j) {
      const Vec2 r = x - (b.a + g.nodes[j] * db);
      inner += g.weights[j] * std::log(dot(r, r));
    }
    sum += g.weights[i] * inner;
  }
  return 0.5 * sum * a.length() * b.length();
}

int entry_far_order(double dist, double hmax, int outer_order) {
  int m;
  if (dist >= 25.0 * hmax)
    m = 3;
  else if (dist >= 8.0 * hmax)
    m = 4;
  else if (dist >= 2.5 * hmax)
    m = 6;
  else if (dist >= 1.4 * hmax)
    m = 8;
  else
    return 0;
  return outer_order == 16 ? m : std::min(kMaxGaussOrder, (m * outer_order + 15) / 16);
}

}  // namespace

double log_potential(const Segment& b, Vec2 x) {
  const auto [s, d, c] = to_local(b, x);
  const double sp = s + c, sm = s - c;
  const double r1 = sp * sp + d * d, r2 = sm * sm + d * d;
  double val;
  if (r1 > 0.0 && r2 > 0.0 && std::abs(4.0 * s * c) < 0.5 * r2) {
    val = 0.5 * s * std::log1p(4.0 * s * c / r2) + 0.5 * c * (std::log(r1) + std::log(r2));
  } else {
    const double t1 = r1 > 0.0 ? sp * std::log(r1) : 0.0;
    const double t2 = r2 > 0.0 ? sm * std::log(r2) : 0.0;
    val = 0.5 * (t1 - t2);
  }
  val -= 2.0 * c;
  if (d != 0.0) val += d * std::atan2(2.0 * c * d, s * s + d * d - c * c);
  return val;
}

Vec2 log_potential_gradient(const Segment& b, Vec2 x) {
  const PanelFrame f(b);
  const Vec2 r = x - f.m;
  const Vec2 n{f.u.y, -f.u.x};
  const double s = dot(r, f.u), d = dot(r, n);
  const Vec2 ra = x - b.a, rb = x - b.b;
  const double a2 = dot(ra, ra), b2 = dot(rb, rb);
  const double ds = std::abs(4.0 * s * f.c) < 0.5 * b2 ? 0.5 * std::log1p(4.0 * s * f.c / b2) : 0.5 * std::log(a2 / b2);
  const double dd = d == 0.0 ? 0.0 : std::atan2(cross(rb, ra), dot(ra, rb));
  return ds * f.u + dd * n;
}

double slp_entry(const Segment& a_in, const Segment& b_in, int outer_order) {
  // Canonical order: the shorter panel is the outer one.
  const bool swap = lexicographically_smaller(b_in, a_in);
  const Segment& a = swap ? b_in : a_in;
  const Segment& b = swap ? a_in : b_in;
  const double ha = a.length(), hb = b.length();
  if (!(ha > 0.0) || !(hb > 0.0)) throw InvalidInput("slp_entry: degenerate segment");
  const double hmax = std::max(ha, hb);

  const double dist_bound = norm(a.midpoint() - b.midpoint()) - 0.5 * (ha + hb);
  if (const int m = entry_far_order(dist_bound, hmax, outer_order); m > 0)
    return -kInvTwoPi * far_tensor(a, b, m);

  if ((a.a == b.a && a.b == b.b) || (a.a == b.b && a.b == b.a))
    return -kInvTwoPi * ha * ha * (std::log(ha) - 1.5);

  const Vec2 u = a.tangent();
  const double scale = hmax + norm(b.a - a.a);
  const bool collinear =
      std::abs(cross(u, b.a - a.a)) <= 1e-14 * scale && std::abs(cross(u, b.b - a.a)) <= 1e-14 * scale;
  if (collinear) {
    double y0 = dot(b.a - a.a, u), y1 = dot(b.b - a.a, u);
    if (y0 > y1) std::swap(y0, y1);
    const double x0 = 0.0, x1 = ha;
    const double overlap = std::min(x1, y1) - std::max(x0, y0);
    if (overlap > 1e-12 * scale) throw InvalidInput("slp_entry: overlapping segments");
    // The closed form cancels badly unless the panels are of comparable size.
    if (hb <= 4.0 * ha) {
      const double dbl = -phi_collinear(x1 - y1) + phi_collinear(x0 - y1) + phi_collinear(x1 - y0) - phi_collinear(x0 - y0);
      return -kInvTwoPi * dbl;
    }
  }
  return -kInvTwoPi * outer_recursive(a, b, outer_order, 0);
}

double slp_tangent_derivative(const Segment& b, Vec2 x, Vec2 t, int order_scale) {
  return -kInvTwoPi * detail::log_tangent_derivative(detail::SourcePanel(b), x, t, order_scale);
}

double slp_eval(const Mesh& mesh, std::span<const double> coeffs, Vec2 x) {
  if (coeffs.size() != mesh.size()) throw InvalidInput("slp_eval: coefficient length does not match mesh");
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (coeffs[k] != 0.0) sum += coeffs[k] * slp_potential(mesh[k].segment, x);
  return sum;
}

double slp_grad_eval(const Mesh& mesh, std::span<const double> coeffs, int panel, Vec2 x, Vec2 tangent,
                     int order_scale) {
  if (coeffs.size() != mesh.size()) throw InvalidInput("slp_grad_eval: coefficient length does not match mesh");
  if (panel < 0 || static_cast<std::size_t>(panel) >= mesh.size())
    throw InvalidInput("slp_grad_eval: panel " + std::to_string(panel) + " out of range");
  const Segment& seg = mesh[static_cast<std::size_t>(panel)].segment;
  const double h = seg.length();
  const Vec2 tp = seg.tangent();
  const double s = dot(x - seg.a, tp);
  const double off = std::abs(cross(tp, x - seg.a));
  if (!(s > 0.0 && s < h) || off > 1e-12 * h)
    throw InvalidEvaluationPoint("slp_grad_eval: point is not strictly inside panel " + std::to_string(panel));
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    if (static_cast<int>(k) == panel)
      sum += coeffs[k] * dot(tangent, tp) * slp_self_tangent_derivative(h, s);
    else
      sum += coeffs[k] * slp_tangent_derivative(mesh[k].segment, x, tangent, order_scale);
  }
  return sum;
}

double haar_energy(const Segment& plus, const Segment& minus, int outer_order) {
  const double a = 1.0 / plus.length(), b = -1.0 / minus.length();
  return a * a * slp_entry(plus, plus, outer_order) + 2.0 * a * b * slp_entry(plus, minus, outer_order) +
         b * b * slp_entry(minus, minus, outer_order);
}

double haar_energy(const Mesh& mesh, const Node& node, int outer_order) {
  const int n = static_cast<int>(mesh.size());
  if (node.plus < 0 || node.minus < 0 || node.plus >= n || node.minus >= n || node.plus == node.minus)
    throw InvalidInput("haar_energy: node is not an interior node");
  const auto rn = mesh.right_neighbor(node.plus);
  if (!rn || *rn != node.minus) throw InvalidInput("haar_energy: node elements are not neighbours");
  return haar_energy(mesh[static_cast<std::size_t>(node.plus)].segment, mesh[static_cast<std::size_t>(node.minus)].segment,
                     outer_order);
}

}  // namespace bem2d

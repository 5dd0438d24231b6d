#include "bem2d/problems.hpp"

#include <cmath>
#include <numbers>

#include "bem2d/errors.hpp"
#include "bem2d/quadrature.hpp"

namespace bem2d {

namespace {

constexpr double kZExponent = 4.0 / 7.0;

// Angle in [-3pi/4, pi]: the domain is the complement of the wedge between
// the rays at pi and 5pi/4.
// Angle in [-3pi/4, pi]. The sector (-pi, -3pi/4) lies outside the domain;
// boundary points land there only through rounding, from the edge at -3pi/4
// or from the negative x-axis, so they snap to whichever is nearer.
double zshape_angle(Vec2 p) {
  constexpr double pi = std::numbers::pi;
  if (p.y == 0.0 && p.x < 0.0) return pi;
  const double xi = std::atan2(p.y, p.x);
  if (xi >= -0.75 * pi) return xi;
  return xi < -0.875 * pi ? xi + 2.0 * pi : -0.75 * pi;
}

}  // namespace

double zshape_u(Vec2 p) {
  const double r = norm(p);
  if (r == 0.0) return 0.0;
  return std::pow(r, kZExponent) * std::cos(kZExponent * zshape_angle(p));
}

Vec2 zshape_gradient(Vec2 p) {
  const double r = norm(p);
  if (r == 0.0) throw DataEvaluationError("gradient of r^(4/7) cos(4 xi/7) is singular at the origin", -1);
  // grad(r^a cos(a xi)) = a r^(a-1) (cos((a-1) xi), -sin((a-1) xi))
  const double xi = zshape_angle(p);
  const double f = kZExponent * std::pow(r, kZExponent - 1.0);
  return {f * std::cos((kZExponent - 1.0) * xi), -f * std::sin((kZExponent - 1.0) * xi)};
}

HarmonicTrace zshape_trace() { return {zshape_u, zshape_gradient, {{0.0, 0.0}}}; }

ProblemSpec slit_problem(int n0) {
  ProblemSpec p;
  p.name = "slit";
  p.geometry = std::make_shared<const BoundaryGeometry>(slit_geometry());
  p.rhs = RhsSpec::constant(1.0);
  p.n0 = n0;
  ExactSolution ex;
  ex.density = [](Vec2 x, int) { return 2.0 / (std::numbers::ln2 * std::sqrt((1.0 - x.x) * (1.0 + x.x))); };
  ex.singular_points = {{-1.0, 0.0}, {1.0, 0.0}};
  ex.energy_sq = 2.0 * std::numbers::pi / std::numbers::ln2;
  ex.square_integrable = false;
  p.exact = ex;
  p.expected = ExpectedRates{-0.5, -1.5};
  p.grading_point = Vec2{-1.0, 0.0};
  return p;
}

ProblemSpec zshape_problem(int n0, double scale) {
  ProblemSpec p;
  p.name = "zshape";
  p.geometry = std::make_shared<const BoundaryGeometry>(zshape_geometry(scale));
  p.rhs = RhsSpec::dirichlet_trace(zshape_trace());
  p.n0 = n0;
  ExactSolution ex;
  auto geometry = p.geometry;
  ex.density = [geometry](Vec2 x, int edge) { return dot(zshape_gradient(x), geometry->edge(edge).normal()); };
  ex.singular_points = {{0.0, 0.0}};
  p.exact = ex;
  p.exact->energy_sq = dual_pairing(p, ex.density, ex.singular_points);
  p.expected = ExpectedRates{-4.0 / 7.0, -1.5};
  p.grading_point = Vec2{0.0, 0.0};
  return p;
}

double dual_pairing(const ProblemSpec& problem, const std::function<double(Vec2, int)>& density,
                    const std::vector<Vec2>& density_singularities, int order, int pieces) {
  const BoundaryGeometry& geo = *problem.geometry;
  QuadratureOptions q;
  q.data_order = std::max(q.data_order, order);
  auto is_special = [&](Vec2 p, int vertex) {
    if (vertex >= 0 && geo.is_corner(vertex)) return true;
    for (Vec2 s : density_singularities)
      if (s == p) return true;
    if (!problem.rhs.is_constant())
      for (Vec2 s : problem.rhs.trace().singular_points)
        if (s == p) return true;
    return false;
  };
  const int nv = static_cast<int>(geo.vertices().size());
  double total = 0.0;
  for (int e = 0; e < geo.edge_count(); ++e) {
    const Segment edge = geo.edge(e);
    const bool sa = is_special(edge.a, e), sb = is_special(edge.b, (e + 1) % nv);
    const Vec2 d = edge.b - edge.a;
    auto integrand = [&](double t) {
      const Vec2 x = edge.a + t * d;
      // graded nodes rounding onto an end point carry weight below roundoff
      if (!strictly_inside(edge, x)) return 0.0;
      return problem.rhs.value(geo, x, e, q) * density(x, e);
    };
    double sum = 0.0;
    for (int k = 0; k < pieces; ++k) {
      const double t0 = static_cast<double>(k) / pieces, t1 = static_cast<double>(k + 1) / pieces;
      sum += integrate_interval(t0, t1, integrand, order, k == 0 && sa, k + 1 == pieces && sb);
    }
    total += edge.length() * sum;
  }
  return total;
}

double energy_error_exact(const ExactSolution& exact, double b_dot_x, double x_a_x) {
  if (!std::isfinite(exact.energy_sq)) throw InvalidInput("exact solution carries no energy norm");
  const double radicand = exact.energy_sq - 2.0 * b_dot_x + x_a_x;
  if (radicand < -1e-12 * std::max(1.0, exact.energy_sq))
    throw InconsistentExactSolution("energy error radicand is negative (" + std::to_string(radicand) +
                                    "): the exact solution does not solve V phi = f");
  return std::sqrt(std::max(0.0, radicand));
}

double energy_error_exact(const ExactSolution& exact, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x) {
  if (a.rows() != x.size() || b.size() != x.size()) throw InvalidInput("energy_error_exact: dimension mismatch");
  return energy_error_exact(exact, b.dot(x), x.dot(a * x));
}

double weighted_l2_error(const Mesh& mesh, std::span<const double> coeffs, const ExactSolution& exact, int order) {
  if (coeffs.size() != mesh.size()) throw InvalidInput("weighted_l2_error: coefficient length does not match mesh");
  if (!exact.square_integrable) return std::numeric_limits<double>::quiet_NaN();
  auto singular = [&](Vec2 p) {
    for (Vec2 s : exact.singular_points)
      if (s == p) return true;
    return false;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Element& el = mesh[i];
    const Vec2 a = el.segment.a, d = el.segment.b - el.segment.a;
    const double c = coeffs[i];
    const double integral = integrate_interval(
        0.0, 1.0,
        [&](double t) {
          if (!strictly_inside(el.segment, a + t * d)) return 0.0;
          const double diff = exact.density(a + t * d, el.edge) - c;
          return diff * diff;
        },
        order, singular(el.segment.a), singular(el.segment.b));
    sum += el.h * el.h * integral;
  }
  return std::sqrt(sum);
}

}  // namespace bem2d

#include "bem2d/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "bem2d/errors.hpp"
#include "bem2d/quadrature.hpp"
#include "csv_format.hpp"
#include "gradient_kernel.hpp"
#include "parallel.hpp"

namespace bem2d {

double EstimatorResult::eta() const { return std::sqrt(total); }

namespace {

struct Context {
  const Mesh& mesh;
  std::span<const double> x;
  const ProblemData& data;
  const QuadratureOptions& q;
  std::vector<detail::SourcePanel> panels;
  const LogWeightedRule& rule;

  Context(const Mesh& m, std::span<const double> coeffs, const ProblemData& d, const QuadratureOptions& opts)
      : mesh(m), x(coeffs), data(d), q(opts), rule(log_weighted_gauss(opts.estimator_order)) {
    if (coeffs.size() != m.size()) throw InvalidInput("estimate: coefficient length does not match mesh");
    if (d.nodes_per_element != opts.estimator_order || d.stride != 2 * graded_estimator_order(opts) ||
        d.data_derivative.size() != m.size() * static_cast<std::size_t>(d.stride) || d.graded.size() != m.size() ||
        static_cast<std::size_t>(d.rhs.size()) != m.size())
      throw InvalidInput("estimate: problem data was prepared for a different mesh or quadrature");
    panels.reserve(m.size());
    for (const Element& e : m.elements()) panels.emplace_back(e.segment);
  }
};

// (V psi)' at x inside element i; sl, sr = local distances of x to the element ends.
double slp_derivative_at(const Context& ctx, std::size_t i, Vec2 x, double sl, double sr) {
  const detail::SourcePanel& self = ctx.panels[i];
  double grad = 0.0;
  for (std::size_t j = 0; j < ctx.panels.size(); ++j) {
    const double cj = ctx.x[j];
    if (cj == 0.0 || j == i) continue;
    grad += cj * detail::log_tangent_derivative(ctx.panels[j], x, self.u, ctx.q.estimator_order);
  }
  return -kInvTwoPi * (grad + ctx.x[i] * std::log(sl / sr));
}

// Plain quadrature of the squared residual on the graded rule, for elements
// where f' itself is singular at an end point.
double graded_indicator(const Context& ctx, std::size_t i) {
  const detail::SourcePanel& self = ctx.panels[i];
  const QuadratureRule& g = graded_gauss(graded_estimator_order(ctx.q));
  const double* fprime = &ctx.data.data_derivative[i * static_cast<std::size_t>(ctx.data.stride)];
  double integral = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double sl = g.nodes[uk], sr = g.one_minus(k);
    const Vec2 xq = sl <= 0.5 ? self.a + sl * self.d : self.b - sr * self.d;
    // nodes rounding onto an end point carry weight below roundoff
    if (xq == self.a || xq == self.b) continue;
    const double u = fprime[k] - slp_derivative_at(ctx, i, xq, sl, sr);
    integral += g.weights[uk] * u * u;
  }
  const double h = ctx.mesh[i].h;
  const double eta2 = h * h * integral;
  if (!std::isfinite(eta2)) throw DataEvaluationError("non-finite estimator contribution", static_cast<long>(i));
  return eta2;
}

double element_indicator(const Context& ctx, std::size_t i) {
  if (ctx.data.graded[i]) return graded_indicator(ctx, i);
  const Mesh& mesh = ctx.mesh;
  const detail::SourcePanel& self = ctx.panels[i];
  const double h = mesh[i].h;
  const int nq = ctx.q.estimator_order;
  const auto& nodes = ctx.rule.base.nodes;
  const auto& w = ctx.rule.base.weights;

  // Coefficients of log(sigma) and log(1-sigma) in (V psi)' near the element ends.
  const double xi = ctx.x[i];
  double left_log = xi, right_log = -xi;
  if (auto l = mesh.left_neighbor(static_cast<int>(i)))
    left_log -= ctx.x[static_cast<std::size_t>(*l)] * dot(self.u, ctx.panels[static_cast<std::size_t>(*l)].u);
  if (auto r = mesh.right_neighbor(static_cast<int>(i)))
    right_log += ctx.x[static_cast<std::size_t>(*r)] * dot(self.u, ctx.panels[static_cast<std::size_t>(*r)].u);
  const double alpha = kInvTwoPi * left_log;   // residual u = f' - (V psi)'
  const double beta = kInvTwoPi * right_log;

  double quad_rho2 = 0.0, quad_left = 0.0, quad_right = 0.0;
  const double* fprime = &ctx.data.data_derivative[i * static_cast<std::size_t>(ctx.data.stride)];
  for (int k = 0; k < nq; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double sigma = nodes[uk];
    const double u = fprime[k] - slp_derivative_at(ctx, i, self.a + sigma * self.d, sigma, 1.0 - sigma);
    const double rho = u - alpha * std::log(sigma) - beta * std::log1p(-sigma);
    quad_rho2 += w[uk] * rho * rho;
    quad_left += ctx.rule.log_left[uk] * rho;
    quad_right += ctx.rule.log_right[uk] * rho;
  }
  constexpr double cross_term = 2.0 - std::numbers::pi * std::numbers::pi / 6.0;
  const double integral = quad_rho2 + 2.0 * alpha * quad_left + 2.0 * beta * quad_right + 2.0 * alpha * alpha +
                          2.0 * beta * beta + 2.0 * alpha * beta * cross_term;
  const double eta2 = h * h * integral;
  if (!std::isfinite(eta2)) throw DataEvaluationError("non-finite estimator contribution", static_cast<long>(i));
  return std::max(0.0, eta2);
}

EstimatorResult finish(std::vector<double> per_element) {
  EstimatorResult r;
  r.per_element = std::move(per_element);
  for (double v : r.per_element) r.total += v;
  return r;
}

}  // namespace

EstimatorResult estimate(const Mesh& mesh, std::span<const double> coeffs, const ProblemData& data,
                         const QuadratureOptions& q) {
  const Context ctx(mesh, coeffs, data, q);
  std::vector<double> eta2(mesh.size());
  const auto n = static_cast<long>(mesh.size());
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i)
    slot.run([&] { eta2[static_cast<std::size_t>(i)] = element_indicator(ctx, static_cast<std::size_t>(i)); });
  slot.rethrow();
  return finish(std::move(eta2));
}

EstimatorResult estimate_reference(const Mesh& mesh, std::span<const double> coeffs, const ProblemData& data,
                                   const QuadratureOptions& q) {
  const Context ctx(mesh, coeffs, data, q);
  std::vector<double> eta2(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) eta2[i] = element_indicator(ctx, i);
  return finish(std::move(eta2));
}

EstimatorResult estimate(const Mesh& mesh, std::span<const double> coeffs, const RhsSpec& rhs, const QuadratureOptions& q) {
  return estimate(mesh, coeffs, prepare_problem_data(mesh, rhs, q), q);
}

double estimator_restricted(const EstimatorResult& result, std::span<const int> subset) {
  double sum = 0.0;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= result.per_element.size())
      throw InvalidInput("estimator_restricted: unknown element " + std::to_string(i));
    sum += result.per_element[static_cast<std::size_t>(i)];
  }
  return std::sqrt(sum);
}

void write_estimator_csv(std::ostream& out, const EstimatorResult& result) {
  out << "element_id,eta_sq\n";
  for (std::size_t i = 0; i < result.per_element.size(); ++i) out << i << ',' << detail::fmt(result.per_element[i]) << '\n';
}

}  // namespace bem2d

#include "bem2d/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bem2d/errors.hpp"
#include "bem2d/quadrature.hpp"
#include "parallel.hpp"

namespace bem2d {

RhsSpec RhsSpec::constant(double c) {
  if (!std::isfinite(c)) throw InvalidInput("constant right-hand side must be finite");
  RhsSpec r;
  r.constant_ = c;
  return r;
}

RhsSpec RhsSpec::dirichlet_trace(HarmonicTrace g) {
  if (!g.value || !g.gradient) throw InvalidInput("dirichlet trace needs value and gradient evaluators");
  RhsSpec r;
  r.trace_ = std::make_shared<const HarmonicTrace>(std::move(g));
  return r;
}

namespace {

bool is_singular_point(const HarmonicTrace& g, Vec2 p) {
  return std::find(g.singular_points.begin(), g.singular_points.end(), p) != g.singular_points.end();
}

template <class K>
double edge_integral(Vec2 pa, Vec2 pb, Vec2 x, const K& k, int order, int depth, bool sa, bool sb) {
  const Segment piece{pa, pb};
  const double len = piece.length();
  if (depth < 60 && distance(piece, x) < len) {
    const Vec2 m = piece.midpoint();
    return edge_integral(pa, m, x, k, order, depth + 1, sa, false) +
           edge_integral(m, pb, x, k, order, depth + 1, false, sb);
  }
  const Vec2 d = pb - pa;
  return len * integrate_interval(0.0, 1.0, [&](double t) { return k(pa + t * d); }, order, sa, sb);
}

void check_inside_edge(const BoundaryGeometry& geometry, Vec2 x, int edge) {
  if (edge < 0 || edge >= geometry.edge_count()) throw InvalidInput("edge " + std::to_string(edge) + " out of range");
  if (!strictly_inside(geometry.edge(edge), x))
    throw InvalidEvaluationPoint("double layer evaluation point is not strictly inside edge " + std::to_string(edge));
}

// Sum over all edges but the one containing x of int k(y) g(y) ds_y.
// Everything is computed relative to the end of x's edge nearest to x, with x
// projected onto the edge line: the kernels grow like 1/r^2 at corners and
// absolute coordinates would put x off the line by far more than r allows.
template <class Kernel>
double dlp_sum(const BoundaryGeometry& geometry, const HarmonicTrace& g, Vec2 x, int edge, const QuadratureOptions& q,
               const Kernel& kernel) {
  check_inside_edge(geometry, x, edge);
  const Segment own = geometry.edge(edge);
  const Vec2 t = own.tangent();
  const double sa = dot(x - own.a, t), sb = dot(x - own.b, t);
  const bool from_a = sa <= -sb;
  const Vec2 o = from_a ? own.a : own.b;
  const Vec2 xr = (from_a ? sa : sb) * t;
  double sum = 0.0;
  for (int e = 0; e < geometry.edge_count(); ++e) {
    if (e == edge) continue;
    const Segment seg = geometry.edge(e);
    const Vec2 n = seg.normal();
    // Edges on the carrier line of x's edge contribute (x-y).n(y) = 0.
    const double tol = 1e-14 * own.length();
    if (std::abs(cross(t, seg.a - own.a)) <= tol && std::abs(cross(t, seg.b - own.a)) <= tol) continue;
    auto integrand = [&](Vec2 yr) { return kernel(xr - yr, n) * g.value(o + yr); };
    sum += edge_integral(seg.a - o, seg.b - o, xr, integrand, q.data_order, 0, is_singular_point(g, seg.a),
                         is_singular_point(g, seg.b));
  }
  return sum;
}

}  // namespace

double dlp_eval(const BoundaryGeometry& geometry, const HarmonicTrace& g, Vec2 x, int edge, const QuadratureOptions& q) {
  return dlp_sum(geometry, g, x, edge, q, [](Vec2 r, Vec2 n) { return kInvTwoPi * dot(r, n) / dot(r, r); });
}

double dlp_eval(const Mesh& mesh, const HarmonicTrace& g, Vec2 x, int avoid_panel, const QuadratureOptions& q) {
  if (avoid_panel < 0 || static_cast<std::size_t>(avoid_panel) >= mesh.size())
    throw InvalidInput("dlp_eval: panel " + std::to_string(avoid_panel) + " out of range");
  const Element& el = mesh[static_cast<std::size_t>(avoid_panel)];
  const Vec2 t = el.segment.tangent();
  const double s = dot(x - el.segment.a, t);
  if (!(s > 0.0 && s < el.h) || std::abs(cross(t, x - el.segment.a)) > 1e-12 * el.h)
    throw InvalidEvaluationPoint("dlp_eval: point is not strictly inside panel " + std::to_string(avoid_panel));
  return dlp_eval(mesh.geometry(), g, x, el.edge, q);
}

double dlp_tangent_derivative(const BoundaryGeometry& geometry, const HarmonicTrace& g, Vec2 x, int edge,
                              const QuadratureOptions& q) {
  check_inside_edge(geometry, x, edge);
  const Vec2 t = geometry.edge(edge).tangent();
  return dlp_sum(geometry, g, x, edge, q, [t](Vec2 r, Vec2 n) {
    const double r2 = dot(r, r);
    return kInvTwoPi * (dot(t, n) / r2 - 2.0 * dot(r, n) * dot(r, t) / (r2 * r2));
  });
}

double RhsSpec::value(const BoundaryGeometry& geometry, Vec2 x, int edge, const QuadratureOptions& q) const {
  if (!trace_) return constant_;
  return dlp_eval(geometry, *trace_, x, edge, q) + 0.5 * trace_->value(x);
}

double RhsSpec::tangent_derivative(const BoundaryGeometry& geometry, Vec2 x, int edge, const QuadratureOptions& q) const {
  if (!trace_) return 0.0;
  const Vec2 t = geometry.edge(edge).tangent();
  return dlp_tangent_derivative(geometry, *trace_, x, edge, q) + 0.5 * dot(trace_->gradient(x), t);
}

Eigen::MatrixXd assemble_galerkin_reference(const Mesh& mesh, const QuadratureOptions& q) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      a(i, j) = slp_entry(mesh[static_cast<std::size_t>(i)].segment, mesh[static_cast<std::size_t>(j)].segment, q.outer_order);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = a(j, i);
  return a;
}

Eigen::MatrixXd assemble_galerkin(const Mesh& mesh, const QuadratureOptions& q, const Mesh* previous_mesh,
                                  const Eigen::MatrixXd* previous_matrix) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  std::vector<int> old(mesh.size(), -1);
  if (previous_mesh && previous_matrix) {
    if (previous_matrix->rows() != static_cast<Eigen::Index>(previous_mesh->size()))
      throw InvalidInput("previous matrix does not match previous mesh");
    const auto index = previous_mesh->index_map();
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (auto it = index.find(mesh[i].key); it != index.end()) old[i] = it->second;
  }
  Eigen::MatrixXd a(n, n);
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) {
    slot.run([&] {
      const int oi = old[static_cast<std::size_t>(i)];
      const Segment& si = mesh[static_cast<std::size_t>(i)].segment;
      for (Eigen::Index j = i; j < n; ++j) {
        const int oj = old[static_cast<std::size_t>(j)];
        a(i, j) = oi >= 0 && oj >= 0 ? (*previous_matrix)(oi, oj)
                                     : slp_entry(si, mesh[static_cast<std::size_t>(j)].segment, q.outer_order);
      }
    });
  }
  slot.rethrow();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = a(j, i);
  return a;
}

void verify_spd(const Eigen::MatrixXd& matrix) {
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success)
    throw NonEllipticGeometry("Galerkin matrix is not positive definite; rescale the geometry so that diam < 1");
}

namespace {

struct CornerSet {
  std::vector<Vec2> points;
  bool contains(Vec2 p) const { return std::find(points.begin(), points.end(), p) != points.end(); }
};

CornerSet data_singularities(const BoundaryGeometry& geometry, const RhsSpec& rhs) {
  CornerSet c;
  for (int v = 0; v < static_cast<int>(geometry.vertices().size()); ++v)
    if (geometry.is_corner(v)) c.points.push_back(geometry.vertices()[static_cast<std::size_t>(v)]);
  if (!rhs.is_constant())
    for (Vec2 p : rhs.trace().singular_points) c.points.push_back(p);
  return c;
}

bool needs_grading(const Mesh& mesh, const RhsSpec& rhs, const CornerSet& corners, std::size_t i) {
  return !rhs.is_constant() && (corners.contains(mesh[i].segment.a) || corners.contains(mesh[i].segment.b));
}

void element_data(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q, const CornerSet& corners, std::size_t i,
                  double& load, double* derivative) {
  const Element& el = mesh[i];
  const int nq = q.estimator_order;
  const bool graded = needs_grading(mesh, rhs, corners, i);
  if (rhs.is_constant()) {
    load = rhs.constant_value() * el.h;
    return;
  }
  const BoundaryGeometry& geo = mesh.geometry();
  const Vec2 a = el.segment.a, d = el.segment.b - el.segment.a;
  const Segment edge = geo.edge(el.edge);
  load = el.h * integrate_interval(
                    0.0, 1.0,
                    [&](double t) {
                      const Vec2 x = a + t * d;
                      // substituted nodes can round onto a corner; their weight is below roundoff
                      if (!strictly_inside(edge, x)) return 0.0;
                      return rhs.value(geo, x, el.edge, q);
                    },
                    q.data_order, corners.contains(el.segment.a), corners.contains(el.segment.b));
  if (!std::isfinite(load)) throw DataEvaluationError("non-finite load integral", static_cast<long>(i));
  const QuadratureRule& g = graded ? graded_gauss(graded_estimator_order(q)) : gauss_legendre(nq);
  for (int k = 0; k < g.size(); ++k) {
    const double sigma = g.nodes[static_cast<std::size_t>(k)];
    const Vec2 x = sigma <= 0.5 ? a + sigma * d : el.segment.b - g.one_minus(k) * d;
    derivative[k] = strictly_inside(edge, x) ? rhs.tangent_derivative(geo, x, el.edge, q) : 0.0;
    if (!std::isfinite(derivative[k])) throw DataEvaluationError("non-finite data derivative", static_cast<long>(i));
  }
}

ProblemData empty_data(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q, const CornerSet& corners) {
  ProblemData data;
  data.nodes_per_element = q.estimator_order;
  data.stride = 2 * graded_estimator_order(q);
  data.derivative_is_zero = rhs.is_constant();
  data.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.size()));
  data.data_derivative.assign(mesh.size() * static_cast<std::size_t>(data.stride), 0.0);
  data.graded.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) data.graded[i] = needs_grading(mesh, rhs, corners, i);
  return data;
}

}  // namespace

ProblemData prepare_problem_data_reference(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q) {
  const CornerSet corners = data_singularities(mesh.geometry(), rhs);
  ProblemData data = empty_data(mesh, rhs, q, corners);
  const auto nq = static_cast<std::size_t>(data.stride);
  for (std::size_t i = 0; i < mesh.size(); ++i)
    element_data(mesh, rhs, q, corners, i, data.rhs[static_cast<Eigen::Index>(i)], &data.data_derivative[i * nq]);
  return data;
}

ProblemData prepare_problem_data(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q, const Mesh* previous_mesh,
                                 const ProblemData* previous) {
  const CornerSet corners = data_singularities(mesh.geometry(), rhs);
  ProblemData data = empty_data(mesh, rhs, q, corners);
  const auto nq = static_cast<std::size_t>(data.stride);
  std::vector<int> old(mesh.size(), -1);
  if (previous_mesh && previous && previous->nodes_per_element == q.estimator_order) {
    const auto index = previous_mesh->index_map();
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (auto it = index.find(mesh[i].key); it != index.end()) old[i] = it->second;
  }
  const auto n = static_cast<long>(mesh.size());
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
  for (long li = 0; li < n; ++li) {
    slot.run([&] {
      const auto i = static_cast<std::size_t>(li);
      if (const int o = old[i]; o >= 0) {
        data.rhs[li] = previous->rhs[o];
        std::copy_n(&previous->data_derivative[static_cast<std::size_t>(o) * nq], nq, &data.data_derivative[i * nq]);
      } else {
        element_data(mesh, rhs, q, corners, i, data.rhs[li], &data.data_derivative[i * nq]);
      }
    });
  }
  slot.rethrow();
  return data;
}

Eigen::VectorXd assemble_rhs(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q) {
  if (rhs.is_constant()) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(mesh.size()));
    for (std::size_t i = 0; i < mesh.size(); ++i) b[static_cast<Eigen::Index>(i)] = rhs.constant_value() * mesh[i].h;
    return b;
  }
  return prepare_problem_data(mesh, rhs, q).rhs;
}

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_parallel_threads(int n) {
  if (n < 1) throw InvalidInput("thread count must be positive");
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

}  // namespace bem2d

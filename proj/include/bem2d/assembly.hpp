#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bem2d/kernel.hpp"
#include "bem2d/mesh.hpp"

namespace bem2d {

// Trace g = u|Gamma of a function u harmonic in the domain, with the gradient of u.
struct HarmonicTrace {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  // Points where u is not smooth; quadrature grades towards them.
  std::vector<Vec2> singular_points;
};

class RhsSpec {
 public:
  static RhsSpec constant(double c);
  // f = (K + 1/2) g on a closed polygon.
  static RhsSpec dirichlet_trace(HarmonicTrace g);

  bool is_constant() const { return !trace_; }
  double constant_value() const { return constant_; }
  const HarmonicTrace& trace() const { return *trace_; }

  // f(x) and its tangential derivative along the edge, x strictly inside the given geometry edge.
  double value(const BoundaryGeometry& geometry, Vec2 x, int edge, const QuadratureOptions& q) const;
  double tangent_derivative(const BoundaryGeometry& geometry, Vec2 x, int edge, const QuadratureOptions& q) const;

 private:
  double constant_ = 0.0;
  std::shared_ptr<const HarmonicTrace> trace_;
};

// (K g)(x) = int_Gamma d/dn(y) G(x-y) g(y) ds_y for x strictly inside geometry edge `edge`.
double dlp_eval(const BoundaryGeometry& geometry, const HarmonicTrace& g, Vec2 x, int edge, const QuadratureOptions& q = {});
// Same, with x strictly inside mesh element avoid_panel.
double dlp_eval(const Mesh& mesh, const HarmonicTrace& g, Vec2 x, int avoid_panel, const QuadratureOptions& q = {});
// Tangential derivative of K g along the edge direction at x.
double dlp_tangent_derivative(const BoundaryGeometry& geometry, const HarmonicTrace& g, Vec2 x, int edge,
                              const QuadratureOptions& q = {});

struct GalerkinSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  QuadratureOptions quad;
};

// Dense Galerkin matrix. With a previous mesh and its matrix, entries between
// elements present in both are copied instead of recomputed.
Eigen::MatrixXd assemble_galerkin(const Mesh& mesh, const QuadratureOptions& q = {}, const Mesh* previous_mesh = nullptr,
                                  const Eigen::MatrixXd* previous_matrix = nullptr);
// Serial reference without reuse; must agree bit for bit with assemble_galerkin.
Eigen::MatrixXd assemble_galerkin_reference(const Mesh& mesh, const QuadratureOptions& q = {});

// Throws NonEllipticGeometry when the matrix has no Cholesky factor.
void verify_spd(const Eigen::MatrixXd& matrix);

// Per-element data: the load b_j = int_{T_j} f, and f' at the estimator nodes.
inline int graded_estimator_order(const QuadratureOptions& q) { return 2 * q.estimator_order; }

struct ProblemData {
  Eigen::VectorXd rhs;
  // f' at the estimator nodes, element j at offset j * stride. Elements
  // touching a corner or a singular point of the data use
  // graded_gauss(2n) (4n nodes), all others the n-point Gauss rule.
  std::vector<double> data_derivative;
  std::vector<char> graded;
  int nodes_per_element = 0;
  int stride = 0;
  bool derivative_is_zero = true;
};

ProblemData prepare_problem_data(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q = {},
                                 const Mesh* previous_mesh = nullptr, const ProblemData* previous = nullptr);
ProblemData prepare_problem_data_reference(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q = {});

Eigen::VectorXd assemble_rhs(const Mesh& mesh, const RhsSpec& rhs, const QuadratureOptions& q = {});

// Number of OpenMP threads the kernels use (1 without OpenMP).
int parallel_threads();
// No effect without OpenMP.
void set_parallel_threads(int n);

}  // namespace bem2d

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bem2d/assembly.hpp"
#include "bem2d/geometry.hpp"
#include "bem2d/mesh.hpp"

namespace bem2d {

struct ExactSolution {
  // phi*(x) for x on the given geometry edge.
  std::function<double(Vec2, int)> density;
  // Points where the density blows up algebraically; quadrature grades towards them.
  std::vector<Vec2> singular_points;
  // <f, phi*> = ||phi*||^2 in the energy norm.
  double energy_sq = std::numeric_limits<double>::quiet_NaN();
  // The density is square integrable (needed for the weighted L2 error).
  bool square_integrable = true;
};

struct ExpectedRates {
  double uniform = 0.0;
  double adaptive = 0.0;
};

struct ProblemSpec {
  std::string name;
  std::shared_ptr<const BoundaryGeometry> geometry;
  RhsSpec rhs = RhsSpec::constant(1.0);
  int n0 = 0;
  std::optional<ExactSolution> exact;
  std::optional<ExpectedRates> expected;
  std::optional<Vec2> grading_point;  // target of graded refinement studies
};

// Open arc (-1,1)x{0} with f = 1; phi*(x) = 2 / (ln 2 sqrt(1 - x^2)).
ProblemSpec slit_problem(int n0 = 4);

// Reentrant-corner polygon with f = (K + 1/2) g for g = r^(4/7) cos(4 xi/7).
ProblemSpec zshape_problem(int n0 = 8, double scale = 0.125);

double zshape_u(Vec2 p);
Vec2 zshape_gradient(Vec2 p);
HarmonicTrace zshape_trace();

// <f, phi> by edge-wise Gauss quadrature graded towards corners and singular points.
double dual_pairing(const ProblemSpec& problem, const std::function<double(Vec2, int)>& density,
                    const std::vector<Vec2>& density_singularities, int order = 32, int pieces = 4);

// ||phi* - psi||_V = (<f,phi*> - 2 b.x + x.Ax)^(1/2). Throws InconsistentExactSolution
// when the radicand is below -1e-12 (relative to <f,phi*>).
double energy_error_exact(const ExactSolution& exact, double b_dot_x, double x_a_x);
double energy_error_exact(const ExactSolution& exact, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x);

// ||h^(1/2) (phi* - psi)||_{L2}
double weighted_l2_error(const Mesh& mesh, std::span<const double> coeffs, const ExactSolution& exact, int order = 16);

}  // namespace bem2d

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bem2d/estimator.hpp"
#include "bem2d/kernel.hpp"
#include "bem2d/mesh.hpp"
#include "bem2d/pcg.hpp"
#include "bem2d/preconditioner.hpp"
#include "bem2d/problems.hpp"

namespace bem2d {

struct AlgorithmParams {
  double theta = 0.5;
  double lambda = 1e-3;
  std::size_t max_dofs = 4096;
  PrecondKind precond = PrecondKind::aswz;
  bool nested = true;
  std::uint64_t seed = 20180101;
  int cond_steps = 0;  // > 0: Lanczos condition estimate of the preconditioned matrix on every level
  int max_levels = 400;
  bool track_exact_error = true;
  QuadratureOptions quad;

  bool uniform() const { return theta >= 1.0; }
  void validate() const;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One record per PCG step (j,k), k >= 1.
struct StepRecord {
  int j = 0;
  int k = 0;
  std::size_t n = 0;
  double eta = 0.0;
  double step_energy = 0.0;
  double err_exact = kNaN;
  double quasi_error = kNaN;  // (err^2 + eta^2)^(1/2)
  double rel_residual = 0.0;
  std::size_t marked = 0;  // only on the last step of a level
  long total_index = 0;    // |(j,k)|
  double cum_n = 0.0;
  double cum_nlogn = 0.0;
  double cum_nlog2n = 0.0;
  double cond = kNaN;  // only on the last step of a level
  bool level_final = false;
};

struct LevelRecord {
  int j = 0;
  std::size_t n = 0;
  int kbar = 0;
  std::size_t marked = 0;
  double eta = 0.0;
  double step_energy = 0.0;
  double err_exact = kNaN;
  double l2_error = kNaN;        // ||h^(1/2)(phi* - phi_h)||
  double weak_efficiency = kNaN;  // eta / (l2_error + step_energy)
  std::optional<ConditionEstimate> cond;
};

struct AdaptiveRunLog {
  std::string problem;
  double geometry_scale = 1.0;
  AlgorithmParams params;
  std::vector<StepRecord> steps;
  std::vector<LevelRecord> levels;
  std::vector<Mesh> meshes;  // T_0 .. T_J
  Eigen::VectorXd final_coeffs;
  std::optional<std::string> failure;  // set when a numerical error aborted the run
};

// Optional observer called after each completed level with the data it was solved on.
struct LevelView {
  int j;
  const Mesh& mesh;
  const Eigen::MatrixXd& matrix;
  const Eigen::VectorXd& rhs;
  const Eigen::VectorXd& coeffs;  // phi_{j kbar}
  const EstimatorResult& estimate;
};
using LevelObserver = std::function<void(const LevelView&)>;

// Minimal set carrying theta^2 of the total squared estimator: sort descending
// (ties by smaller id) and take the shortest sufficient prefix. Returned ascending.
std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta);

AdaptiveRunLog adaptive_run(const ProblemSpec& problem, const AlgorithmParams& params, const LevelObserver& observer = {});

struct FitWindow {
  double x_min = 0.0;
  double x_max = std::numeric_limits<double>::infinity();
};

// Quantities: N, eta, err, quasi, step_energy, cum_N, cum_NlogN, cum_Nlog2N, total_index.
// Uses the last record of every level only.
double rate_fit(const AdaptiveRunLog& log, std::string_view x_quantity, std::string_view y_quantity, FitWindow window);
double least_squares_slope(std::span<const double> log_x, std::span<const double> log_y);

struct CostEntry {
  double n = 0.0, nlogn = 0.0, nlog2n = 0.0;
};
std::vector<CostEntry> cost_ledger(const AdaptiveRunLog& log);

}  // namespace bem2d

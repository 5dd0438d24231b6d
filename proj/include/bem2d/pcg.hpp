#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "bem2d/linear_operator.hpp"

namespace bem2d {

// Residual below this fraction of ||b|| counts as solved to rounding.
inline constexpr double kPcgRoundoffTolerance = 1e-14;
inline constexpr int kResidualCheckInterval = 50;

struct PcgState {
  Eigen::VectorXd b;
  Eigen::VectorXd x;  // iterate x_k
  Eigen::VectorXd r;  // b - A x_k
  Eigen::VectorXd z;  // P^{-1} r_k
  Eigen::VectorXd p;  // search direction
  double rz = 0.0;    // r_k . z_k
  double alpha = 0.0;
  double beta = 0.0;
  double step_energy = 0.0;  // ||x_k - x_{k-1}||_A
  int k = 0;
  bool converged = false;
  double b_norm = 0.0;
  // Lanczos data: alpha_j and beta_j of every step taken.
  std::vector<double> alphas;
  std::vector<double> betas;
  // max relative deviation of the updated residual from b - A x at the checkpoints
  double residual_drift = 0.0;
  // steps between replacements of r by b - A x; 0 keeps the pure recurrence,
  // which the Lanczos coefficients rely on
  int residual_check_interval = kResidualCheckInterval;

  double relative_residual() const;
};

PcgState pcg_init(const LinearOperator& a, const LinearOperator& p_inv, const Eigen::VectorXd& b, const Eigen::VectorXd& x0);

// One PCG step. A converged state is left unchanged apart from step_energy = 0.
void pcg_step(const LinearOperator& a, const LinearOperator& p_inv, PcgState& state);

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

SolveResult pcg_solve(const LinearOperator& a, const LinearOperator& p_inv, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& x0, double tol, int max_iterations = -1);

struct ConditionEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double cond = 0.0;
  int steps = 0;
  bool breakdown = false;  // fewer Lanczos steps than requested were available
};

// Extreme Ritz values of the Lanczos tridiagonal matrix built from PCG coefficients.
ConditionEstimate lanczos_extremes(const std::vector<double>& alphas, const std::vector<double>& betas);

// cond(P^{-1/2} A P^{-1/2}) from at most m PCG steps on a seeded random right-hand side.
ConditionEstimate cond_estimate(const LinearOperator& a, const LinearOperator& p_inv, int m, std::uint64_t seed);

// CSV trace columns k,rel_residual,step_energy
void write_pcg_trace_header(std::ostream& out);
void write_pcg_trace_row(std::ostream& out, const PcgState& state);

}  // namespace bem2d

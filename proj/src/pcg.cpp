#include "bem2d/pcg.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "bem2d/errors.hpp"
#include "csv_format.hpp"

namespace bem2d {

double PcgState::relative_residual() const { return b_norm > 0.0 ? r.norm() / b_norm : r.norm(); }

namespace {

bool small_residual(const PcgState& s) { return s.r.norm() <= kPcgRoundoffTolerance * s.b_norm; }

}  // namespace

PcgState pcg_init(const LinearOperator& a, const LinearOperator& p_inv, const Eigen::VectorXd& b, const Eigen::VectorXd& x0) {
  if (a.size() != b.size() || x0.size() != b.size() || p_inv.size() != b.size())
    throw InvalidInput("pcg_init: dimension mismatch (A " + std::to_string(a.size()) + ", P " + std::to_string(p_inv.size()) +
                       ", b " + std::to_string(b.size()) + ", x0 " + std::to_string(x0.size()) + ")");
  PcgState s;
  s.b = b;
  s.b_norm = b.norm();
  s.x = x0;
  Eigen::VectorXd ax(b.size());
  a.apply(x0, ax);
  s.r = b - ax;
  s.z.resize(b.size());
  p_inv.apply(s.r, s.z);
  s.p = s.z;
  s.rz = s.r.dot(s.z);
  s.converged = s.r.squaredNorm() == 0.0 || small_residual(s);
  return s;
}

void pcg_step(const LinearOperator& a, const LinearOperator& p_inv, PcgState& s) {
  if (s.converged) {
    s.step_energy = 0.0;
    return;
  }
  Eigen::VectorXd ap(s.p.size());
  a.apply(s.p, ap);
  const double pap = s.p.dot(ap);
  if (!(pap > 0.0)) throw NotPositiveDefinite("PCG: nonpositive curvature p.Ap = " + std::to_string(pap));
  if (!(s.rz > 0.0)) throw NotPositiveDefinite("PCG: preconditioner is not positive definite (r.z = " + std::to_string(s.rz) + ")");
  s.alpha = s.rz / pap;
  s.x += s.alpha * s.p;
  s.step_energy = std::abs(s.alpha) * std::sqrt(pap);
  ++s.k;
  if (s.residual_check_interval > 0 && s.k % s.residual_check_interval == 0) {
    Eigen::VectorXd ax(s.x.size());
    a.apply(s.x, ax);
    Eigen::VectorXd true_r = s.b - ax;
    s.r -= s.alpha * ap;
    const double scale = std::max(s.b_norm, 1e-300);
    s.residual_drift = std::max(s.residual_drift, (true_r - s.r).norm() / scale);
    s.r = std::move(true_r);
  } else {
    s.r -= s.alpha * ap;
  }
  p_inv.apply(s.r, s.z);
  const double rz_new = s.r.dot(s.z);
  s.beta = rz_new / s.rz;
  s.rz = rz_new;
  s.p = s.z + s.beta * s.p;
  s.alphas.push_back(s.alpha);
  s.betas.push_back(s.beta);
  s.converged = s.r.squaredNorm() == 0.0 || small_residual(s);
}

SolveResult pcg_solve(const LinearOperator& a, const LinearOperator& p_inv, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& x0, double tol, int max_iterations) {
  if (!(tol >= 0.0)) throw InvalidInput("pcg_solve: tolerance must be nonnegative");
  PcgState s = pcg_init(a, p_inv, b, x0);
  const int limit = max_iterations >= 0 ? max_iterations : static_cast<int>(b.size());
  auto done = [&] { return s.converged || s.r.norm() <= tol * s.b_norm; };
  while (!done()) {
    if (s.k >= limit)
      throw NonConvergence("PCG did not reach relative residual " + std::to_string(tol) + " within " +
                           std::to_string(limit) + " steps (" + std::to_string(s.relative_residual()) + ")");
    pcg_step(a, p_inv, s);
  }
  return {s.x, s.k, s.relative_residual()};
}

ConditionEstimate lanczos_extremes(const std::vector<double>& alphas, const std::vector<double>& betas) {
  ConditionEstimate est;
  const auto m = static_cast<Eigen::Index>(alphas.size());
  est.steps = static_cast<int>(m);
  if (m == 0) return est;
  Eigen::VectorXd diag(m), sub(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index k = 0; k < m; ++k) {
    diag[k] = 1.0 / alphas[static_cast<std::size_t>(k)];
    if (k > 0) {
      const double bprev = betas[static_cast<std::size_t>(k - 1)];
      const double aprev = alphas[static_cast<std::size_t>(k - 1)];
      diag[k] += bprev / aprev;
      sub[k - 1] = std::sqrt(bprev) / aprev;
    }
  }
  if (m == 1) {
    est.lambda_min = est.lambda_max = diag[0];
  } else {
    // computeFromTridiagonal does not rescale and can stall on entries of
    // mixed magnitude; the dense solver is the fallback.
    const double scale = std::max(diag.cwiseAbs().maxCoeff(), sub.cwiseAbs().maxCoeff());
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalFailure("Lanczos matrix is not finite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag / scale, sub / scale, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      t.diagonal() = diag / scale;
      t.diagonal(-1) = sub / scale;
      eig.compute(t, Eigen::EigenvaluesOnly);
      if (eig.info() != Eigen::Success) throw NumericalFailure("Lanczos eigenvalues did not converge");
    }
    est.lambda_min = scale * eig.eigenvalues().minCoeff();
    est.lambda_max = scale * eig.eigenvalues().maxCoeff();
  }
  est.cond = est.lambda_max / est.lambda_min;
  return est;
}

ConditionEstimate cond_estimate(const LinearOperator& a, const LinearOperator& p_inv, int m, std::uint64_t seed) {
  if (m < 2) throw InvalidInput("cond_estimate needs at least 2 Lanczos steps");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd b(a.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
  PcgState s = pcg_init(a, p_inv, b, Eigen::VectorXd::Zero(b.size()));
  s.residual_check_interval = 0;
  while (s.k < m && !s.converged) pcg_step(a, p_inv, s);
  ConditionEstimate est = lanczos_extremes(s.alphas, s.betas);
  est.breakdown = s.k < m;
  return est;
}

void write_pcg_trace_header(std::ostream& out) { out << "k,rel_residual,step_energy\n"; }

void write_pcg_trace_row(std::ostream& out, const PcgState& s) {
  out << s.k << ',' << detail::fmt(s.relative_residual()) << ',' << detail::fmt(s.step_energy) << '\n';
}

}  // namespace bem2d

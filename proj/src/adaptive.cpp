#include "bem2d/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "bem2d/assembly.hpp"
#include "bem2d/errors.hpp"
#include "bem2d/estimator.hpp"
#include "bem2d/quadrature.hpp"

namespace bem2d {

void AlgorithmParams::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidInput("theta must lie in (0,1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive and finite");
  if (max_dofs < 1) throw InvalidInput("max_dofs must be positive");
  if (max_levels < 1) throw InvalidInput("max_levels must be positive");
  if (cond_steps < 0 || cond_steps == 1) throw InvalidInput("cond_steps must be 0 or at least 2");
  for (int order : {quad.outer_order, quad.data_order, quad.estimator_order})
    if (order < 1 || order > kMaxGaussOrder)
      throw InvalidInput("quadrature orders must lie in 1.." + std::to_string(kMaxGaussOrder));
}

std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidInput("doerfler_mark: theta must lie in (0,1]");
  for (double v : eta_sq)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("doerfler_mark: indicators must be finite and nonnegative");
  std::vector<int> order(eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta_sq[static_cast<std::size_t>(a)] > eta_sq[static_cast<std::size_t>(b)];
  });
  // Sum in the same order as the prefix so that theta = 1 is reached exactly.
  double total = 0.0;
  for (int i : order) total += eta_sq[static_cast<std::size_t>(i)];
  if (total == 0.0) throw EmptyMarking("doerfler_mark: all indicators vanish");
  const double target = theta * theta * total;
  std::vector<int> marked;
  double acc = 0.0;
  for (int i : order) {
    acc += eta_sq[static_cast<std::size_t>(i)];
    marked.push_back(i);
    if (acc >= target) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

namespace {

Eigen::VectorXd prolongate(const MeshHierarchy& hierarchy, int level, const Eigen::VectorXd& coarse) {
  const auto& parent = hierarchy.parent(level);
  Eigen::VectorXd fine(static_cast<Eigen::Index>(parent.size()));
  for (std::size_t i = 0; i < parent.size(); ++i) fine[static_cast<Eigen::Index>(i)] = coarse[parent[i]];
  return fine;
}

}  // namespace

AdaptiveRunLog adaptive_run(const ProblemSpec& problem, const AlgorithmParams& params, const LevelObserver& observer) {
  params.validate();
  if (!problem.geometry) throw InvalidInput("problem has no geometry");
  AdaptiveRunLog log;
  log.problem = problem.name;
  log.geometry_scale = problem.geometry->scale_factor();
  log.params = params;
  const QuadratureOptions& q = params.quad;
  const bool with_exact = params.track_exact_error && problem.exact && std::isfinite(problem.exact->energy_sq);

  MeshHierarchy hierarchy(make_initial_mesh(problem.geometry, problem.n0));
  auto store_meshes = [&] {
    log.meshes.clear();
    for (std::size_t l = 0; l < hierarchy.level_count(); ++l) log.meshes.push_back(hierarchy.level(static_cast<int>(l)));
  };

  try {
    const Mesh* mesh = &hierarchy.finest();
    Eigen::MatrixXd a = assemble_galerkin(*mesh, q);
    verify_spd(a);
    ProblemData data = prepare_problem_data(*mesh, problem.rhs, q);
    std::unique_ptr<MultilevelPreconditioner> multilevel;
    if (params.precond == PrecondKind::aswz) multilevel = std::make_unique<MultilevelPreconditioner>(hierarchy, a, q.outer_order);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh->size()));
    long total_index = 0;
    double cum_n = 0.0, cum_nlogn = 0.0, cum_nlog2n = 0.0;

    for (int j = 0;; ++j) {
      const DenseOperator a_op(a);
      std::unique_ptr<LinearOperator> simple;
      const LinearOperator* p_inv = multilevel.get();
      if (params.precond == PrecondKind::diag)
        simple = std::make_unique<DiagonalPreconditioner>(a);
      else if (params.precond == PrecondKind::none)
        simple = std::make_unique<IdentityOperator>(a.rows());
      if (simple) p_inv = simple.get();

      const std::size_t n = mesh->size();
      const double dn = static_cast<double>(n), ln = std::log(dn);
      PcgState state = pcg_init(a_op, *p_inv, data.rhs, x0);
      EstimatorResult est;
      const int max_steps = 10 * static_cast<int>(n) + 100;
      for (int k = 1;; ++k) {
        pcg_step(a_op, *p_inv, state);
        est = estimate(*mesh, {state.x.data(), n}, data, q);
        StepRecord rec;
        rec.j = j;
        rec.k = k;
        rec.n = n;
        rec.eta = est.eta();
        rec.step_energy = state.step_energy;
        rec.rel_residual = state.relative_residual();
        if (with_exact) {
          rec.err_exact = energy_error_exact(*problem.exact, data.rhs.dot(state.x), state.x.dot(a * state.x));
          rec.quasi_error = std::sqrt(rec.err_exact * rec.err_exact + est.total);
        }
        rec.total_index = ++total_index;
        cum_n += dn;
        cum_nlogn += dn * ln;
        cum_nlog2n += dn * ln * ln;
        rec.cum_n = cum_n;
        rec.cum_nlogn = cum_nlogn;
        rec.cum_nlog2n = cum_nlog2n;
        const bool stop = state.step_energy <= params.lambda * rec.eta;
        rec.level_final = stop;
        log.steps.push_back(rec);
        if (stop) break;
        if (k >= max_steps)
          throw NonConvergence("level " + std::to_string(j) + ": PCG stopping test not met after " + std::to_string(k) + " steps");
      }

      LevelRecord lev;
      lev.j = j;
      lev.n = n;
      lev.kbar = log.steps.back().k;
      lev.eta = log.steps.back().eta;
      lev.step_energy = log.steps.back().step_energy;
      lev.err_exact = log.steps.back().err_exact;
      if (with_exact && problem.exact->square_integrable) {
        lev.l2_error = weighted_l2_error(*mesh, {state.x.data(), n}, *problem.exact);
        lev.weak_efficiency = lev.eta / (lev.l2_error + lev.step_energy);
      }
      if (params.cond_steps > 0) {
        lev.cond = cond_estimate(a_op, *p_inv, std::min<int>(params.cond_steps, static_cast<int>(n)), params.seed + static_cast<std::uint64_t>(j));
        log.steps.back().cond = lev.cond->cond;
      }
      if (observer) observer(LevelView{j, *mesh, a, data.rhs, state.x, est});
      log.final_coeffs = state.x;

      if (n >= params.max_dofs || est.total == 0.0 || j + 1 >= params.max_levels) {
        log.levels.push_back(lev);
        break;
      }
      std::vector<int> marked;
      if (params.uniform()) {
        marked.resize(n);
        std::iota(marked.begin(), marked.end(), 0);
      } else {
        marked = doerfler_mark(est.per_element, params.theta);
      }
      lev.marked = marked.size();
      log.steps.back().marked = marked.size();
      log.levels.push_back(lev);

      const Mesh* previous = mesh;
      hierarchy.push_back(refine(*previous, marked));
      mesh = &hierarchy.finest();
      previous = &hierarchy.level(j);
      a = assemble_galerkin(*mesh, q, previous, &a);
      data = prepare_problem_data(*mesh, problem.rhs, q, previous, &data);
      if (multilevel) multilevel->extend(hierarchy);
      x0 = params.nested ? prolongate(hierarchy, j + 1, state.x) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh->size()));
    }
  } catch (const NumericalFailure& e) {
    log.failure = e.what();
  }
  store_meshes();
  return log;
}

namespace {

double quantity(const StepRecord& r, std::string_view name) {
  if (name == "N") return static_cast<double>(r.n);
  if (name == "eta") return r.eta;
  if (name == "err") return r.err_exact;
  if (name == "quasi") return r.quasi_error;
  if (name == "step_energy") return r.step_energy;
  if (name == "cum_N") return r.cum_n;
  if (name == "cum_NlogN") return r.cum_nlogn;
  if (name == "cum_Nlog2N") return r.cum_nlog2n;
  if (name == "total_index") return static_cast<double>(r.total_index);
  throw InvalidInput("unknown rate-fit quantity '" + std::string(name) + "'");
}

}  // namespace

double least_squares_slope(std::span<const double> lx, std::span<const double> ly) {
  if (lx.size() != ly.size() || lx.size() < 2) throw InvalidInput("least_squares_slope needs at least two points");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw InvalidInput("least_squares_slope: all x values coincide");
  return sxy / sxx;
}

double rate_fit(const AdaptiveRunLog& log, std::string_view x_quantity, std::string_view y_quantity, FitWindow window) {
  std::vector<double> lx, ly;
  for (const StepRecord& r : log.steps) {
    if (!r.level_final) continue;
    const double x = quantity(r, x_quantity), y = quantity(r, y_quantity);
    if (!(x >= window.x_min && x <= window.x_max)) continue;
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  if (lx.size() < 4)
    throw InvalidInput("rate_fit: only " + std::to_string(lx.size()) + " usable points in the window (need 4)");
  return least_squares_slope(lx, ly);
}

std::vector<CostEntry> cost_ledger(const AdaptiveRunLog& log) {
  std::vector<CostEntry> out;
  out.reserve(log.steps.size());
  CostEntry acc;
  for (const StepRecord& r : log.steps) {
    const double n = static_cast<double>(r.n), l = std::log(n);
    acc.n += n;
    acc.nlogn += n * l;
    acc.nlog2n += n * l * l;
    out.push_back(acc);
  }
  return out;
}

}  // namespace bem2d

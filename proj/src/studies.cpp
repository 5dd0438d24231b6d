#include "bem2d/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bem2d/assembly.hpp"
#include "bem2d/errors.hpp"

namespace bem2d {

RefinementMode parse_refinement_mode(std::string_view name) {
  if (name == "adaptive") return RefinementMode::adaptive;
  if (name == "graded") return RefinementMode::graded;
  if (name == "uniform") return RefinementMode::uniform;
  throw InvalidInput("unknown refinement mode '" + std::string(name) + "' (expected adaptive, graded or uniform)");
}

std::string to_string(RefinementMode mode) {
  switch (mode) {
    case RefinementMode::adaptive:
      return "adaptive";
    case RefinementMode::graded:
      return "graded";
    case RefinementMode::uniform:
      return "uniform";
  }
  return "?";
}

std::vector<Mesh> uniform_sequence(const ProblemSpec& problem, std::size_t max_dofs) {
  std::vector<Mesh> out{make_initial_mesh(problem.geometry, problem.n0)};
  while (2 * out.back().size() <= max_dofs) out.push_back(uniform_refinement(out.back()));
  return out;
}

std::vector<Mesh> graded_sequence(const ProblemSpec& problem, Vec2 point, std::size_t max_dofs, int max_levels) {
  if (max_levels < 1) throw InvalidInput("graded_sequence: max_levels must be positive");
  std::vector<Mesh> out{make_initial_mesh(problem.geometry, problem.n0)};
  while (static_cast<int>(out.size()) < max_levels) {
    const Mesh& m = out.back();
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d = distance(m[i].segment, point);
      if (d < best) {
        best = d;
        nearest = static_cast<int>(i);
      }
    }
    const int marked[1] = {nearest};
    Mesh next = refine(m, marked);
    if (next.size() > max_dofs) break;
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<double> ConditionStudy::series(PrecondKind kind) const {
  std::vector<double> v;
  for (const ConditionRow& r : rows)
    if (r.kind == kind) v.push_back(r.estimate.cond);
  return v;
}

std::vector<std::size_t> ConditionStudy::sizes() const {
  std::vector<std::size_t> v;
  int last = -1;
  for (const ConditionRow& r : rows) {
    if (r.level == last) continue;
    v.push_back(r.n);
    last = r.level;
  }
  return v;
}

ConditionStudy condition_study(const ProblemSpec& problem, const std::vector<Mesh>& levels,
                               const ConditionStudyOptions& options) {
  if (levels.empty()) throw InvalidInput("condition_study: empty refinement sequence");
  if (options.lanczos_steps < 2) throw InvalidInput("condition_study: lanczos_steps must be at least 2");
  ConditionStudy study;
  study.problem = problem.name;
  study.options = options;
  const QuadratureOptions& q = options.adaptive.quad;

  MeshHierarchy hierarchy(levels.front());
  Eigen::MatrixXd a = assemble_galerkin(levels.front(), q);
  verify_spd(a);
  std::unique_ptr<MultilevelPreconditioner> multilevel;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (l > 0) {
      hierarchy.push_back(levels[l]);
      a = assemble_galerkin(levels[l], q, &levels[l - 1], &a);
    }
    const Mesh& mesh = levels[l];
    const auto lengths = mesh.lengths();
    const DenseOperator a_op(a);
    const int steps = std::min<int>(options.lanczos_steps, static_cast<int>(mesh.size()));
    for (PrecondKind kind : options.kinds) {
      std::unique_ptr<LinearOperator> simple;
      const LinearOperator* p = nullptr;
      if (kind == PrecondKind::aswz) {
        if (!multilevel)
          multilevel = std::make_unique<MultilevelPreconditioner>(hierarchy, a, q.outer_order);
        else
          multilevel->extend(hierarchy);
        p = multilevel.get();
      } else {
        simple = make_preconditioner(kind, hierarchy, a, a, q.outer_order);
        p = simple.get();
      }
      ConditionRow row;
      row.level = static_cast<int>(l);
      row.n = mesh.size();
      row.h_min = *std::min_element(lengths.begin(), lengths.end());
      row.h_max = *std::max_element(lengths.begin(), lengths.end());
      row.kind = kind;
      row.estimate = steps >= 2 ? cond_estimate(a_op, *p, steps, options.seed + l) : ConditionEstimate{1.0, 1.0, 1.0, 0, true};
      study.rows.push_back(row);
    }
  }
  return study;
}

ConditionStudy condition_study(const ProblemSpec& problem, const ConditionStudyOptions& options) {
  std::vector<Mesh> levels;
  switch (options.mode) {
    case RefinementMode::uniform:
      levels = uniform_sequence(problem, options.max_dofs);
      break;
    case RefinementMode::graded:
      levels = graded_sequence(problem, problem.grading_point.value_or(problem.geometry->vertices().front()),
                               options.max_dofs, options.graded_levels);
      break;
    case RefinementMode::adaptive: {
      AlgorithmParams p = options.adaptive;
      p.max_dofs = options.max_dofs;
      p.track_exact_error = false;
      AdaptiveRunLog log = adaptive_run(problem, p);
      if (log.failure) throw NumericalFailure("adaptive refinement for the condition study failed: " + *log.failure);
      levels = std::move(log.meshes);
      break;
    }
  }
  return condition_study(problem, levels, options);
}

int IterationStudy::total(bool nested_run) const {
  int sum = 0;
  for (const IterationRow& r : rows)
    if (r.nested == nested_run) sum += r.kbar;
  return sum;
}

IterationStudy pcg_iteration_study(const ProblemSpec& problem, const AlgorithmParams& params) {
  IterationStudy study;
  study.problem = problem.name;
  study.params = params;
  AlgorithmParams p = params;
  p.track_exact_error = false;
  p.nested = true;
  study.nested = adaptive_run(problem, p);
  p.nested = false;
  study.naive = adaptive_run(problem, p);
  for (const AdaptiveRunLog* log : {&study.nested, &study.naive}) {
    if (log->failure) throw NumericalFailure("PCG iteration study: " + *log->failure);
    for (const LevelRecord& l : log->levels) study.rows.push_back({log == &study.nested, l.j, l.n, l.kbar});
  }
  return study;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("spearman: need two equally long series of length >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidInput("median of an empty sequence");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Check bounded_sequence_check(std::string name, std::span<const double> values, double factor, double rho_max) {
  Check c{std::move(name), false, {}};
  if (values.size() < 2) {
    c.detail = "fewer than two values";
    return c;
  }
  const double mx = *std::max_element(values.begin(), values.end());
  const double med = median({values.begin(), values.end()});
  std::vector<double> level(values.size());
  std::iota(level.begin(), level.end(), 0.0);
  const double rho = spearman(level, values);
  c.pass = mx <= factor * med && rho <= rho_max;
  c.detail = "max " + num(mx) + ", median " + num(med) + ", spearman " + num(rho);
  return c;
}

Check iteration_check(const IterationStudy& study, std::size_t n_from, int slack) {
  Check c{"pcg iterations bounded with nested iteration", false, {}};
  int first = -1, worst = 0;
  for (const IterationRow& r : study.rows) {
    if (!r.nested || r.n < n_from) continue;
    if (first < 0) first = r.kbar;
    worst = std::max(worst, r.kbar);
  }
  const int tn = study.total(true), tz = study.total(false);
  c.pass = first >= 0 && worst <= first + slack && tz > tn;
  c.detail = "kbar at N>=" + std::to_string(n_from) + ": first " + std::to_string(first) + ", max " + std::to_string(worst) +
             "; total nested " + std::to_string(tn) + ", naive " + std::to_string(tz);
  return c;
}

Check slope_check(std::string name, double slope, double expected, double tolerance) {
  Check c{std::move(name), std::abs(slope - expected) <= tolerance, {}};
  c.detail = "slope " + num(slope) + ", expected " + num(expected) + " +- " + num(tolerance);
  return c;
}

}  // namespace bem2d

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bem2d/adaptive.hpp"
#include "bem2d/mesh.hpp"
#include "bem2d/pcg.hpp"
#include "bem2d/preconditioner.hpp"
#include "bem2d/problems.hpp"

namespace bem2d {

enum class RefinementMode { adaptive, graded, uniform };

RefinementMode parse_refinement_mode(std::string_view name);
std::string to_string(RefinementMode mode);

// T_0 and its uniform refinements while #T <= max_dofs.
std::vector<Mesh> uniform_sequence(const ProblemSpec& problem, std::size_t max_dofs);

// T_0, then repeatedly the element nearest `point` (smaller id on ties) is
// bisected, plus closure. Stops at max_dofs elements or max_levels levels.
std::vector<Mesh> graded_sequence(const ProblemSpec& problem, Vec2 point, std::size_t max_dofs, int max_levels);

struct ConditionRow {
  int level = 0;
  std::size_t n = 0;
  double h_min = 0.0;
  double h_max = 0.0;
  PrecondKind kind = PrecondKind::aswz;
  ConditionEstimate estimate;
};

struct ConditionStudyOptions {
  RefinementMode mode = RefinementMode::adaptive;
  std::vector<PrecondKind> kinds{PrecondKind::aswz, PrecondKind::none};
  std::size_t max_dofs = 4096;
  int graded_levels = 40;
  int lanczos_steps = 200;  // capped by N on every level
  std::uint64_t seed = 20180101;
  AlgorithmParams adaptive;  // theta, lambda, quadrature of the adaptive mode
};

struct ConditionStudy {
  std::string problem;
  ConditionStudyOptions options;
  std::vector<ConditionRow> rows;  // level-major, kinds in option order

  // cond of one preconditioner kind over the levels
  std::vector<double> series(PrecondKind kind) const;
  std::vector<std::size_t> sizes() const;
};

// Condition numbers of P^-1 A on every level of the chosen refinement sequence.
ConditionStudy condition_study(const ProblemSpec& problem, const ConditionStudyOptions& options);
ConditionStudy condition_study(const ProblemSpec& problem, const std::vector<Mesh>& levels, const ConditionStudyOptions& options);

struct IterationRow {
  bool nested = true;
  int j = 0;
  std::size_t n = 0;
  int kbar = 0;
};

struct IterationStudy {
  std::string problem;
  AlgorithmParams params;
  AdaptiveRunLog nested;
  AdaptiveRunLog naive;  // phi_(j+1)0 = 0
  std::vector<IterationRow> rows;
  int total(bool nested_run) const;
};

// Paired adaptive runs with and without nested iteration on the same budget.
IterationStudy pcg_iteration_study(const ProblemSpec& problem, const AlgorithmParams& params);

// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> v);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Bounded sequence: max <= factor * median and Spearman(level, value) <= rho_max.
Check bounded_sequence_check(std::string name, std::span<const double> values, double factor, double rho_max);
// Nested iteration: max kbar over levels with N >= n_from is at most the first such kbar + slack;
// the naive run needs strictly more PCG steps in total.
Check iteration_check(const IterationStudy& study, std::size_t n_from, int slack);
// Fitted slope within tolerance of the expected one.
Check slope_check(std::string name, double slope, double expected, double tolerance);

}  // namespace bem2d

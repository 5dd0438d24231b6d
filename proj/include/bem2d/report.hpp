#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bem2d/adaptive.hpp"
#include "bem2d/problems.hpp"
#include "bem2d/studies.hpp"
#include "json.hpp"

namespace bem2d {

// Everything a CLI invocation needs; filled from a JSON config file and then
// from command-line flags.
struct RunConfig {
  std::string problem = "slit";  // slit, zshape or custom
  int n0 = 0;                    // 0: preset default
  double zscale = 0.125;
  AlgorithmParams params;
  std::string out = "out";
  // custom problem: polygon and constant right-hand side
  std::vector<Vec2> custom_vertices;
  bool custom_closed = false;
  double custom_scale = 1.0;
  double custom_rhs = 1.0;
  // condition study
  RefinementMode mode = RefinementMode::adaptive;
  std::vector<PrecondKind> kinds{PrecondKind::aswz, PrecondKind::none};
  int lanczos_steps = 200;
  int graded_levels = 40;
};

// Keys: problem, n0, zscale, theta, lambda, precond, max_dofs, nested, seed, out,
// max_levels, cond_steps, quad {outer_order, data_order, estimator_order},
// mode, kinds, lanczos_steps, graded_levels, geometry {vertices, closed, scale}, rhs.
// Throws InvalidInput on unknown keys and ill-typed values.
void apply_config(const nlohmann::json& config, RunConfig& cfg);
ProblemSpec make_problem(const RunConfig& cfg);

// Run log, one row per PCG step; unavailable values are left empty.
void write_run_csv(std::ostream& out, const AdaptiveRunLog& log);
nlohmann::json params_json(const AlgorithmParams& p);
// Parameters, geometry scaling, final values and fitted slopes (null when not available).
nlohmann::json run_summary(const AdaptiveRunLog& log, const ProblemSpec& problem);

void write_level_csv(std::ostream& out, const AdaptiveRunLog& log);
void write_condition_csv(std::ostream& out, const ConditionStudy& study);
nlohmann::json condition_summary(const ConditionStudy& study);
void write_iteration_csv(std::ostream& out, const IterationStudy& study);
nlohmann::json iteration_summary(const IterationStudy& study);

nlohmann::json checks_json(const std::vector<Check>& checks);

}  // namespace bem2d

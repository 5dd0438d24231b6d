// bem2d: adaptive BEM experiments for the 2D single-layer equation.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bem2d/errors.hpp"
#include "bem2d/report.hpp"
#include "bem2d/studies.hpp"
#include "json.hpp"

using namespace bem2d;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kAssertion = 4 };

struct Flags {
  std::string config;
  std::string problem;
  int n0 = 0;
  double zscale = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  std::string precond;
  std::size_t max_dofs = 0;
  bool nested = true;
  std::uint64_t seed = 0;
  std::string out;
  int cond_steps = 0;
  int outer_order = 0, data_order = 0, estimator_order = 0;
  std::string mode;
  std::vector<std::string> kinds;
  int lanczos_steps = 0;
  int graded_levels = 0;
  bool assert_results = false;
};

struct Options {
  CLI::Option* problem = nullptr;
  CLI::Option* n0 = nullptr;
  CLI::Option* zscale = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* precond = nullptr;
  CLI::Option* max_dofs = nullptr;
  CLI::Option* nested = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* cond_steps = nullptr;
  CLI::Option* outer_order = nullptr;
  CLI::Option* data_order = nullptr;
  CLI::Option* estimator_order = nullptr;
  CLI::Option* mode = nullptr;
  CLI::Option* kinds = nullptr;
  CLI::Option* lanczos_steps = nullptr;
  CLI::Option* graded_levels = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o) {
  cmd->add_option("--config", f.config, "JSON config file; flags given on the command line take precedence");
  o.problem = cmd->add_option("--problem", f.problem, "slit, zshape or custom (custom needs --config)");
  o.n0 = cmd->add_option("--n0", f.n0, "number of initial elements");
  o.zscale = cmd->add_option("--zscale", f.zscale, "scale factor of the Z-shape");
  o.theta = cmd->add_option("--theta", f.theta, "marking parameter in (0,1]; 1 refines uniformly");
  o.lambda = cmd->add_option("--lambda", f.lambda, "PCG stopping parameter");
  o.precond = cmd->add_option("--precond", f.precond, "aswz, diag or none");
  o.max_dofs = cmd->add_option("--max-dofs", f.max_dofs, "stop once the mesh has this many elements");
  o.nested = cmd->add_option("--nested", f.nested, "start each level from the previous iterate (true/false)");
  o.seed = cmd->add_option("--seed", f.seed, "seed of the Lanczos start vectors");
  o.out = cmd->add_option("--out", f.out, "output directory");
  o.cond_steps = cmd->add_option("--cond-steps", f.cond_steps, "Lanczos steps for a per-level condition estimate (0: off)");
  o.outer_order = cmd->add_option("--quad-outer-order", f.outer_order, "Gauss order of near-field Galerkin entries");
  o.data_order = cmd->add_option("--quad-data-order", f.data_order, "Gauss order of right-hand side integrals");
  o.estimator_order = cmd->add_option("--quad-estimator-order", f.estimator_order, "estimator nodes per element");
  cmd->add_flag("--assert", f.assert_results, "check the expected behaviour and exit with 4 when it fails");
}

RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw InvalidInput("cannot read config file '" + f.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("config file '" + f.config + "' is not valid JSON: " + e.what());
    }
    apply_config(j, cfg);
  }
  auto given = [](const CLI::Option* opt) { return opt && opt->count() > 0; };
  if (given(o.problem)) cfg.problem = f.problem;
  if (given(o.n0)) cfg.n0 = f.n0;
  if (given(o.zscale)) cfg.zscale = f.zscale;
  if (given(o.theta)) cfg.params.theta = f.theta;
  if (given(o.lambda)) cfg.params.lambda = f.lambda;
  if (given(o.precond)) cfg.params.precond = parse_precond_kind(f.precond);
  if (given(o.max_dofs)) cfg.params.max_dofs = f.max_dofs;
  if (given(o.nested)) cfg.params.nested = f.nested;
  if (given(o.seed)) cfg.params.seed = f.seed;
  if (given(o.out)) cfg.out = f.out;
  if (given(o.cond_steps)) cfg.params.cond_steps = f.cond_steps;
  if (given(o.outer_order)) cfg.params.quad.outer_order = f.outer_order;
  if (given(o.data_order)) cfg.params.quad.data_order = f.data_order;
  if (given(o.estimator_order)) cfg.params.quad.estimator_order = f.estimator_order;
  if (given(o.mode)) cfg.mode = parse_refinement_mode(f.mode);
  if (given(o.kinds)) {
    cfg.kinds.clear();
    for (const auto& k : f.kinds) cfg.kinds.push_back(parse_precond_kind(k));
  }
  if (given(o.lanczos_steps)) cfg.lanczos_steps = f.lanczos_steps;
  if (given(o.graded_levels)) cfg.graded_levels = f.graded_levels;
  cfg.params.validate();
  return cfg;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  const fs::path path = fs::path(cfg.out) / name;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const nlohmann::json& j) {
  auto out = open_output(cfg, name);
  out << j.dump(2) << '\n';
}

int report_checks(const std::vector<Check>& checks, bool enforce) {
  bool ok = true;
  for (const Check& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.pass;
  }
  return enforce && !ok ? kAssertion : kOk;
}

int run_converge(const RunConfig& cfg, bool enforce) {
  const ProblemSpec problem = make_problem(cfg);
  const AdaptiveRunLog log = adaptive_run(problem, cfg.params);
  {
    auto out = open_output(cfg, "run.csv");
    write_run_csv(out, log);
  }
  {
    auto out = open_output(cfg, "levels.csv");
    write_level_csv(out, log);
  }
  nlohmann::json summary = run_summary(log, problem);
  std::vector<Check> checks;
  if (enforce && problem.expected) {
    const bool uniform = cfg.params.uniform();
    const auto& slope = summary["slopes"][uniform ? "eta_vs_N" : "eta_vs_N_trailing_decade"];
    const double expected = uniform ? problem.expected->uniform : problem.expected->adaptive;
    const double tol = uniform ? 0.1 : (problem.name == "zshape" ? 0.25 : 0.2);
    if (slope.is_number())
      checks.push_back(slope_check("estimator rate", slope.get<double>(), expected, tol));
    else
      checks.push_back({"estimator rate", false, "not enough levels for a fit"});
    summary["checks"] = checks_json(checks);
  }
  write_json(cfg, "summary.json", summary);
  std::cout << "levels " << log.levels.size() << ", N " << summary["final_n"] << ", eta " << summary["final_eta"]
            << ", PCG steps " << summary["pcg_total"] << ", slope " << summary["slopes"]["eta_vs_N"] << '\n';
  if (log.failure) {
    std::cerr << "numerical failure: " << *log.failure << '\n';
    return kNumerical;
  }
  return report_checks(checks, enforce);
}

int run_cond(const RunConfig& cfg, bool enforce) {
  const ProblemSpec problem = make_problem(cfg);
  ConditionStudyOptions opt;
  opt.mode = cfg.mode;
  opt.kinds = cfg.kinds;
  opt.max_dofs = cfg.params.max_dofs;
  opt.graded_levels = cfg.graded_levels;
  opt.lanczos_steps = cfg.lanczos_steps;
  opt.seed = cfg.params.seed;
  opt.adaptive = cfg.params;
  const ConditionStudy study = condition_study(problem, opt);
  {
    auto out = open_output(cfg, "cond.csv");
    write_condition_csv(out, study);
  }
  nlohmann::json summary = condition_summary(study);
  std::vector<Check> checks;
  if (enforce) {
    const auto sizes = study.sizes();
    for (PrecondKind k : opt.kinds) {
      const auto c = study.series(k);
      // graded sequences saturate monotonically; only the bound is checked there
      const double rho = opt.mode == RefinementMode::graded ? 1.0 : 0.5;
      if (k == PrecondKind::aswz) checks.push_back(bounded_sequence_check("aswz condition bounded", c, 2.0, rho));
      if (k == PrecondKind::none && opt.mode != RefinementMode::graded) {
        std::size_t first = 0;
        while (first + 1 < sizes.size() && sizes[first] < 32) ++first;
        const double growth = c.back() / c[first];
        checks.push_back({"unpreconditioned condition grows", growth >= 5.0,
                          "cond(N=" + std::to_string(sizes.back()) + ") / cond(N=" + std::to_string(sizes[first]) +
                              ") = " + std::to_string(growth)});
      }
      if (k == PrecondKind::none && opt.mode == RefinementMode::graded) {
        int run = 1, best = 1;
        for (std::size_t i = 1; i < c.size(); ++i) {
          run = c[i] > c[i - 1] ? run + 1 : 1;
          best = std::max(best, run);
        }
        checks.push_back({"unpreconditioned condition increases", best >= 5,
                          "longest strictly increasing run: " + std::to_string(best) + " levels"});
      }
    }
    summary["checks"] = checks_json(checks);
  }
  write_json(cfg, "cond_summary.json", summary);
  for (PrecondKind k : opt.kinds)
    std::cout << to_string(k) << ": " << summary["preconditioners"][to_string(k)].dump() << '\n';
  return report_checks(checks, enforce);
}

int run_pcg_iters(const RunConfig& cfg, bool enforce) {
  const ProblemSpec problem = make_problem(cfg);
  const IterationStudy study = pcg_iteration_study(problem, cfg.params);
  {
    auto out = open_output(cfg, "iters.csv");
    write_iteration_csv(out, study);
  }
  nlohmann::json summary = iteration_summary(study);
  std::vector<Check> checks;
  if (enforce) {
    checks.push_back(iteration_check(study, 128, 2));
    summary["checks"] = checks_json(checks);
  }
  write_json(cfg, "iters_summary.json", summary);
  std::cout << "PCG steps: nested " << study.total(true) << ", naive " << study.total(false) << '\n';
  return report_checks(checks, enforce);
}

int run_mesh_dump(const RunConfig& cfg) {
  const ProblemSpec problem = make_problem(cfg);
  AlgorithmParams p = cfg.params;
  p.track_exact_error = false;
  const AdaptiveRunLog log = adaptive_run(problem, p);
  for (std::size_t j = 0; j < log.meshes.size(); ++j) {
    auto out = open_output(cfg, "mesh_" + std::to_string(j) + ".csv");
    write_mesh_csv(out, log.meshes[j], j > 0 ? &log.meshes[j - 1] : nullptr);
  }
  std::cout << log.meshes.size() << " meshes written to " << cfg.out << '\n';
  if (log.failure) {
    std::cerr << "numerical failure: " << *log.failure << '\n';
    return kNumerical;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive boundary element solver for the 2D single-layer equation"};
  app.require_subcommand(1);
  Flags f;
  Options converge_opts, cond_opts, iter_opts, dump_opts;

  CLI::App* converge = app.add_subcommand("converge", "adaptive (or uniform, theta = 1) run with CSV/JSON output");
  add_common(converge, f, converge_opts);
  CLI::App* cond = app.add_subcommand("cond", "condition numbers along a refinement sequence");
  add_common(cond, f, cond_opts);
  cond_opts.mode = cond->add_option("--mode", f.mode, "adaptive, graded or uniform");
  cond_opts.kinds = cond->add_option("--kinds", f.kinds, "preconditioners to compare")->delimiter(',');
  cond_opts.lanczos_steps = cond->add_option("--lanczos-steps", f.lanczos_steps, "maximal Lanczos steps per level");
  cond_opts.graded_levels = cond->add_option("--graded-levels", f.graded_levels, "levels of graded refinement");
  CLI::App* iters = app.add_subcommand("pcg-iters", "PCG steps per level with and without nested iteration");
  add_common(iters, f, iter_opts);
  CLI::App* dump = app.add_subcommand("mesh-dump", "write every mesh of an adaptive run");
  add_common(dump, f, dump_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (converge->parsed()) return run_converge(resolve(f, converge_opts), f.assert_results);
    if (cond->parsed()) return run_cond(resolve(f, cond_opts), f.assert_results);
    if (iters->parsed()) return run_pcg_iters(resolve(f, iter_opts), f.assert_results);
    if (dump->parsed()) return run_mesh_dump(resolve(f, dump_opts));
  } catch (const InvalidInput& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}

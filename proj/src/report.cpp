#include "bem2d/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bem2d/errors.hpp"
#include "csv_format.hpp"

namespace bem2d {

using nlohmann::json;

namespace {

std::string cell(double v) { return std::isfinite(v) ? detail::fmt(v) : std::string(); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<Vec2> parse_vertices(const json& j) {
  if (!j.is_array()) throw InvalidInput("geometry.vertices must be an array of [x, y] pairs");
  std::vector<Vec2> v;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2) throw InvalidInput("geometry.vertices must be an array of [x, y] pairs");
    v.push_back({get<double>(p[0], "geometry.vertices"), get<double>(p[1], "geometry.vertices")});
  }
  return v;
}

json fit_or_null(const AdaptiveRunLog& log, const char* x, const char* y, FitWindow w) {
  try {
    return number_or_null(rate_fit(log, x, y, w));
  } catch (const InvalidInput&) {
    return nullptr;
  }
}

}  // namespace

void apply_config(const json& config, RunConfig& cfg) {
  if (!config.is_object()) throw InvalidInput("config must be a JSON object");
  AlgorithmParams& p = cfg.params;
  for (const auto& [key, value] : config.items()) {
    const char* k = key.c_str();
    if (key == "problem") {
      cfg.problem = get<std::string>(value, k);
    } else if (key == "n0") {
      cfg.n0 = get<int>(value, k);
    } else if (key == "zscale") {
      cfg.zscale = get<double>(value, k);
    } else if (key == "theta") {
      p.theta = get<double>(value, k);
    } else if (key == "lambda") {
      p.lambda = get<double>(value, k);
    } else if (key == "precond") {
      p.precond = parse_precond_kind(get<std::string>(value, k));
    } else if (key == "max_dofs") {
      p.max_dofs = get<std::size_t>(value, k);
    } else if (key == "nested") {
      p.nested = get<bool>(value, k);
    } else if (key == "seed") {
      p.seed = get<std::uint64_t>(value, k);
    } else if (key == "out") {
      cfg.out = get<std::string>(value, k);
    } else if (key == "max_levels") {
      p.max_levels = get<int>(value, k);
    } else if (key == "cond_steps") {
      p.cond_steps = get<int>(value, k);
    } else if (key == "quad") {
      if (!value.is_object()) throw InvalidInput("config key 'quad' must be an object");
      for (const auto& [qk, qv] : value.items()) {
        if (qk == "outer_order")
          p.quad.outer_order = get<int>(qv, "quad.outer_order");
        else if (qk == "data_order")
          p.quad.data_order = get<int>(qv, "quad.data_order");
        else if (qk == "estimator_order")
          p.quad.estimator_order = get<int>(qv, "quad.estimator_order");
        else
          throw InvalidInput("unknown config key 'quad." + qk + "'");
      }
    } else if (key == "mode") {
      cfg.mode = parse_refinement_mode(get<std::string>(value, k));
    } else if (key == "kinds") {
      cfg.kinds.clear();
      for (const auto& name : get<std::vector<std::string>>(value, k)) cfg.kinds.push_back(parse_precond_kind(name));
    } else if (key == "lanczos_steps") {
      cfg.lanczos_steps = get<int>(value, k);
    } else if (key == "graded_levels") {
      cfg.graded_levels = get<int>(value, k);
    } else if (key == "geometry") {
      if (!value.is_object()) throw InvalidInput("config key 'geometry' must be an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "vertices")
          cfg.custom_vertices = parse_vertices(gv);
        else if (gk == "closed")
          cfg.custom_closed = get<bool>(gv, "geometry.closed");
        else if (gk == "scale")
          cfg.custom_scale = get<double>(gv, "geometry.scale");
        else
          throw InvalidInput("unknown config key 'geometry." + gk + "'");
      }
    } else if (key == "rhs") {
      cfg.custom_rhs = get<double>(value, k);
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
}

ProblemSpec make_problem(const RunConfig& cfg) {
  if (cfg.n0 < 0) throw InvalidInput("n0 must be positive");
  if (cfg.problem == "slit") return cfg.n0 > 0 ? slit_problem(cfg.n0) : slit_problem();
  if (cfg.problem == "zshape") {
    if (!(cfg.zscale > 0.0)) throw InvalidInput("zscale must be positive");
    return zshape_problem(cfg.n0 > 0 ? cfg.n0 : 8, cfg.zscale);
  }
  if (cfg.problem == "custom") {
    if (cfg.custom_vertices.size() < 2) throw InvalidInput("custom problem needs geometry.vertices");
    ProblemSpec p;
    p.name = "custom";
    p.geometry = std::make_shared<const BoundaryGeometry>(cfg.custom_vertices, cfg.custom_closed, cfg.custom_scale);
    p.rhs = RhsSpec::constant(cfg.custom_rhs);
    p.n0 = cfg.n0 > 0 ? cfg.n0 : p.geometry->edge_count();
    p.grading_point = p.geometry->vertices().front();
    return p;
  }
  throw InvalidInput("unknown problem '" + cfg.problem + "' (expected slit, zshape or custom)");
}

void write_run_csv(std::ostream& out, const AdaptiveRunLog& log) {
  out << "j,k,N,eta,step_energy,err_exact,lambda_quasi,marked,cum_N,cum_NlogN,cum_Nlog2N,cond_estimate,pcg_total\n";
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const StepRecord& r = log.steps[i];
    // the last level is not marked
    const bool has_marking = r.level_final && static_cast<std::size_t>(r.j) + 1 < log.meshes.size();
    out << r.j << ',' << r.k << ',' << r.n << ',' << cell(r.eta) << ',' << cell(r.step_energy) << ',' << cell(r.err_exact)
        << ',' << cell(r.quasi_error) << ',' << (has_marking ? std::to_string(r.marked) : std::string()) << ','
        << cell(r.cum_n) << ',' << cell(r.cum_nlogn) << ',' << cell(r.cum_nlog2n) << ',' << cell(r.cond) << ','
        << r.total_index << '\n';
  }
}

json params_json(const AlgorithmParams& p) {
  return {{"theta", p.theta},
          {"lambda", p.lambda},
          {"max_dofs", p.max_dofs},
          {"precond", to_string(p.precond)},
          {"nested", p.nested},
          {"uniform", p.uniform()},
          {"seed", p.seed},
          {"cond_steps", p.cond_steps},
          {"max_levels", p.max_levels},
          {"quad",
           {{"outer_order", p.quad.outer_order},
            {"data_order", p.quad.data_order},
            {"estimator_order", p.quad.estimator_order}}}};
}

json run_summary(const AdaptiveRunLog& log, const ProblemSpec& problem) {
  json s;
  s["problem"] = log.problem;
  s["geometry_scale"] = log.geometry_scale;
  s["n0"] = problem.n0;
  s["params"] = params_json(log.params);
  s["levels"] = log.levels.size();
  s["pcg_total"] = log.steps.empty() ? 0 : log.steps.back().total_index;
  int max_kbar = 0;
  for (const LevelRecord& l : log.levels) max_kbar = std::max(max_kbar, l.kbar);
  s["max_kbar"] = max_kbar;
  if (log.levels.empty()) {
    s["final_n"] = 0;
    s["final_eta"] = nullptr;
    s["final_err"] = nullptr;
  } else {
    s["final_n"] = log.levels.back().n;
    s["final_eta"] = number_or_null(log.levels.back().eta);
    s["final_err"] = number_or_null(log.levels.back().err_exact);
  }
  const double n_last = log.levels.empty() ? 0.0 : static_cast<double>(log.levels.back().n);
  const FitWindow from64{64.0};
  const FitWindow decade{n_last / 10.0, n_last};
  s["slopes"] = {{"eta_vs_N", fit_or_null(log, "N", "eta", from64)},
                 {"eta_vs_N_trailing_decade", fit_or_null(log, "N", "eta", decade)},
                 {"err_vs_N", fit_or_null(log, "N", "err", from64)},
                 {"quasi_vs_N", fit_or_null(log, "N", "quasi", from64)},
                 {"eta_vs_cum_Nlog2N", fit_or_null(log, "cum_Nlog2N", "eta", {})}};
  if (problem.expected)
    s["expected"] = {{"uniform", problem.expected->uniform}, {"adaptive", problem.expected->adaptive}};
  else
    s["expected"] = nullptr;
  s["failure"] = log.failure ? json(*log.failure) : json(nullptr);
  return s;
}

void write_level_csv(std::ostream& out, const AdaptiveRunLog& log) {
  out << "j,N,kbar,marked,eta,step_energy,err_exact,l2_error,weak_efficiency,cond_estimate\n";
  for (std::size_t i = 0; i < log.levels.size(); ++i) {
    const LevelRecord& l = log.levels[i];
    out << l.j << ',' << l.n << ',' << l.kbar << ',' << (i + 1 < log.meshes.size() ? std::to_string(l.marked) : std::string())
        << ',' << cell(l.eta) << ',' << cell(l.step_energy) << ',' << cell(l.err_exact) << ',' << cell(l.l2_error) << ','
        << cell(l.weak_efficiency) << ',' << (l.cond ? cell(l.cond->cond) : std::string()) << '\n';
  }
}

void write_condition_csv(std::ostream& out, const ConditionStudy& study) {
  out << "level,N,h_min,h_max,precond,lambda_min,lambda_max,cond,lanczos_steps,breakdown\n";
  for (const ConditionRow& r : study.rows) {
    out << r.level << ',' << r.n << ',' << cell(r.h_min) << ',' << cell(r.h_max) << ',' << to_string(r.kind) << ','
        << cell(r.estimate.lambda_min) << ',' << cell(r.estimate.lambda_max) << ',' << cell(r.estimate.cond) << ','
        << r.estimate.steps << ',' << (r.estimate.breakdown ? 1 : 0) << '\n';
  }
}

json condition_summary(const ConditionStudy& study) {
  json s;
  s["problem"] = study.problem;
  s["mode"] = to_string(study.options.mode);
  s["max_dofs"] = study.options.max_dofs;
  s["lanczos_steps"] = study.options.lanczos_steps;
  s["seed"] = study.options.seed;
  const auto sizes = study.sizes();
  s["levels"] = sizes.size();
  s["final_n"] = sizes.empty() ? 0 : sizes.back();
  json kinds = json::object();
  for (PrecondKind k : study.options.kinds) {
    const auto c = study.series(k);
    if (c.empty()) continue;
    std::vector<double> level(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) level[i] = static_cast<double>(i);
    kinds[to_string(k)] = {{"max", *std::max_element(c.begin(), c.end())},
                           {"median", median(c)},
                           {"first", c.front()},
                           {"last", c.back()},
                           {"spearman_vs_level", c.size() >= 2 ? number_or_null(spearman(level, c)) : json(nullptr)}};
  }
  s["preconditioners"] = kinds;
  return s;
}

void write_iteration_csv(std::ostream& out, const IterationStudy& study) {
  out << "nested,j,N,kbar\n";
  for (const IterationRow& r : study.rows) out << (r.nested ? 1 : 0) << ',' << r.j << ',' << r.n << ',' << r.kbar << '\n';
}

json iteration_summary(const IterationStudy& study) {
  json s;
  s["problem"] = study.problem;
  s["params"] = params_json(study.params);
  s["total_nested"] = study.total(true);
  s["total_naive"] = study.total(false);
  int mn = 0, mz = 0;
  for (const IterationRow& r : study.rows) (r.nested ? mn : mz) = std::max(r.nested ? mn : mz, r.kbar);
  s["max_kbar_nested"] = mn;
  s["max_kbar_naive"] = mz;
  return s;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const Check& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

}  // namespace bem2d

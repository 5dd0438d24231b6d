// One line per acceptance criterion:  [NN] PASS|FAIL  name: detail
// Usage: bem2d_acceptance [criterion numbers...]   (default: all)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bem2d/adaptive.hpp"
#include "bem2d/assembly.hpp"
#include "bem2d/estimator.hpp"
#include "bem2d/pcg.hpp"
#include "bem2d/preconditioner.hpp"
#include "bem2d/problems.hpp"
#include "bem2d/report.hpp"
#include "bem2d/studies.hpp"
#include "oracles.hpp"

using namespace bem2d;

namespace {

using Clock = std::chrono::steady_clock;

std::shared_ptr<const BoundaryGeometry> slit() { return std::make_shared<const BoundaryGeometry>(slit_geometry()); }
std::shared_ptr<const BoundaryGeometry> zshape() { return std::make_shared<const BoundaryGeometry>(zshape_geometry()); }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

int failures = 0;

void report(int id, const Check& c) {
  std::printf("[%02d] %s  %s: %s\n", id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

Check all_of(std::string name, const std::vector<Check>& parts) {
  Check c{std::move(name), true, ""};
  for (const Check& p : parts) {
    c.pass = c.pass && p.pass;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += p.name + (p.pass ? " ok " : " FAILED ") + p.detail;
  }
  return c;
}

Eigen::MatrixXd dense_of(const LinearOperator& op) {
  const Eigen::Index n = op.size();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = op(Eigen::VectorXd::Unit(n, j));
  return m;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

std::vector<double> random_coeffs(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> c(n);
  for (double& v : c) v = nd(rng);
  return c;
}

std::vector<double> prolong(const MeshHierarchy& h, int l, const std::vector<double>& coarse) {
  std::vector<double> fine(h.level(l).size());
  for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = coarse[static_cast<std::size_t>(h.parent(l)[i])];
  return fine;
}

MeshHierarchy random_hierarchy(std::shared_ptr<const BoundaryGeometry> g, int n0, std::size_t n, std::mt19937_64& rng) {
  MeshHierarchy h(make_initial_mesh(std::move(g), n0));
  while (h.finest().size() < n) {
    const Mesh& m = h.finest();
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m.size()) - 1);
    std::vector<int> marked;
    const int count = 1 + pick(rng) % 3;
    for (int i = 0; i < count; ++i) marked.push_back(pick(rng));
    // both ends every fourth level
    if (h.finest_level() % 4 == 0) marked.insert(marked.end(), {0, static_cast<int>(m.size()) - 1});
    h.push_back(refine(m, marked));
  }
  return h;
}

// dense generalized eigenvalue extremes of (A, P) from P^{-1}
std::pair<double, double> dense_extremes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& pinv) {
  const Eigen::MatrixXd sym = 0.5 * (pinv + pinv.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sp(sym);
  const Eigen::MatrixXd half = sp.operatorSqrt();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(half * a * half, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

AlgorithmParams run_params(double theta) {
  AlgorithmParams p;
  p.theta = theta;
  p.lambda = 1e-3;
  p.max_dofs = 4096;
  p.track_exact_error = false;
  return p;
}

Check rate_check(const std::string& name, const AdaptiveRunLog& log, const ProblemSpec& problem, bool uniform,
                 double expected, double tol) {
  if (log.failure) return {name, false, "run failed: " + *log.failure};
  const nlohmann::json s = run_summary(log, problem);
  const auto& slope = s["slopes"][uniform ? "eta_vs_N" : "eta_vs_N_trailing_decade"];
  if (!slope.is_number()) return {name, false, "no slope"};
  Check c = slope_check(name, slope.get<double>(), expected, tol);
  c.detail += ", N " + std::to_string(log.levels.front().n) + ".." + std::to_string(log.levels.back().n) + ", " +
              std::to_string(log.levels.size()) + " levels";
  return c;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------

void criterion_1() {
  const ProblemSpec p = slit_problem();
  const auto t0 = Clock::now();
  const AdaptiveRunLog log = adaptive_run(p, run_params(1.0));
  const double t = seconds_since(t0);
  Check c = rate_check("slit uniform rate", log, p, true, -0.5, 0.1);
  c.detail += ", " + fmt(t) + " s";
  c.pass = c.pass && t < 180.0;
  report(1, c);
}

// The nested adaptive slit run serves criteria 2, 4 and 5.
struct SlitAdaptive {
  ProblemSpec problem = slit_problem();
  IterationStudy study;
};

const SlitAdaptive& slit_adaptive() {
  static const SlitAdaptive s = [] {
    SlitAdaptive r;
    r.study = pcg_iteration_study(r.problem, run_params(0.5));
    return r;
  }();
  return s;
}

void criterion_2() {
  const SlitAdaptive& s = slit_adaptive();
  report(2, rate_check("slit adaptive rate", s.study.nested, s.problem, false, -1.5, 0.2));
}

void criterion_3() {
  const ProblemSpec p = zshape_problem();
  const Check u = rate_check("uniform", adaptive_run(p, run_params(1.0)), p, true, -4.0 / 7.0, 0.1);
  const Check a = rate_check("adaptive", adaptive_run(p, run_params(0.5)), p, false, -1.5, 0.25);
  report(3, all_of("Z-shape rates", {u, a}));
}

void criterion_4() {
  const SlitAdaptive& s = slit_adaptive();
  ConditionStudyOptions opt;
  opt.mode = RefinementMode::adaptive;
  opt.kinds = {PrecondKind::aswz, PrecondKind::none};
  opt.lanczos_steps = 200;
  const ConditionStudy study = condition_study(s.problem, s.study.nested.meshes, opt);
  const auto sizes = study.sizes();
  const auto aswz = study.series(PrecondKind::aswz), none = study.series(PrecondKind::none);
  const Check bounded = bounded_sequence_check("aswz bounded", aswz, 2.0, 0.5);
  std::size_t first = 0;
  while (first + 1 < sizes.size() && sizes[first] < 32) ++first;
  const double growth = none.back() / none[first];
  const Check grows{"unpreconditioned growth", growth >= 5.0,
                    "cond " + fmt(none[first]) + " at N=" + std::to_string(sizes[first]) + " -> " + fmt(none.back()) +
                        " at N=" + std::to_string(sizes.back()) + " (x" + fmt(growth) + ")"};
  report(4, all_of("preconditioner optimality", {bounded, grows}));
}

void criterion_5() {
  const SlitAdaptive& s = slit_adaptive();
  report(5, iteration_check(s.study, 128, 2));
}

void criterion_6() {
  // Every step until the energy error falls below 1e-5 of ||x*||_A; further
  // down the squared energies are dominated by rounding in the quadratic forms.
  std::mt19937_64 rng(6);
  double worst = 0.0;
  int steps = 0;
  for (auto geo : {slit(), zshape()}) {
    const ProblemSpec problem = geo->closed() ? zshape_problem() : slit_problem();
    for (auto kind : {PrecondKind::none, PrecondKind::diag, PrecondKind::aswz}) {
      for (std::size_t n : {64u, 256u}) {
        const MeshHierarchy h = random_hierarchy(geo, geo->closed() ? 8 : 4, n - 8, rng);
        const Mesh& m = h.finest();
        const Eigen::MatrixXd a = assemble_galerkin(m);
        const auto p = make_preconditioner(kind, h, a, assemble_galerkin(h.level(0)));
        const Eigen::VectorXd b = assemble_rhs(m, problem.rhs);
        const Eigen::VectorXd xstar = a.llt().solve(b);
        const double norm_star = std::sqrt(xstar.dot(a * xstar));
        const DenseOperator op(a);
        PcgState s = pcg_init(op, *p, b, Eigen::VectorXd::Zero(b.size()));
        for (;;) {
          const Eigen::VectorXd prev = s.x;
          const Eigen::VectorXd d0 = xstar - prev;
          const double e0 = d0.dot(a * d0);
          if (s.converged || s.k >= b.size() || std::sqrt(e0) < 1e-5 * norm_star) break;
          pcg_step(op, *p, s);
          const Eigen::VectorXd d1 = xstar - s.x;
          const double e1 = d1.dot(a * d1);
          worst = std::max(worst, std::abs(e0 - e1 - s.step_energy * s.step_energy) / e0);
          ++steps;
        }
      }
    }
  }
  report(6, {"Pythagoras identity", worst <= 1e-10, "max relative defect " + fmt(worst) + " over " + std::to_string(steps) + " steps"});
}

void criterion_7() {
  std::mt19937_64 rng(7);
  double worst = 0.0, asym = 0.0;
  int hierarchies = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto geo = trial % 2 ? zshape() : slit();
    const MeshHierarchy h = random_hierarchy(geo, geo->closed() ? 8 : 2, 16 + static_cast<std::size_t>(trial) * 2, rng);
    if (h.finest().size() > 64) continue;
    std::vector<Mesh> levels;
    std::vector<Eigen::MatrixXd> mats;
    for (int l = 0; l <= h.finest_level(); ++l) {
      levels.push_back(h.level(l));
      mats.push_back(assemble_galerkin(h.level(l)));
    }
    const Eigen::MatrixXd want = oracle::multilevel_inverse(levels, mats);
    const MultilevelPreconditioner p(h, mats[0]);
    const Eigen::MatrixXd got = dense_of(p);
    worst = std::max(worst, (got - want).norm() / want.norm());
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd u = random_vector(p.size(), rng), v = random_vector(p.size(), rng);
      const double uv = u.dot(p(v)), vu = v.dot(p(u));
      asym = std::max(asym, std::abs(uv - vu) / (u.norm() * p(v).norm()));
    }
    ++hierarchies;
  }
  report(7, {"preconditioner oracle", hierarchies >= 15 && worst <= 1e-12 && asym <= 1e-12,
             std::to_string(hierarchies) + " hierarchies, rel. error " + fmt(worst) + ", asymmetry " + fmt(asym)});
}

void criterion_8() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> theta(0.05, 1.0);
  std::exponential_distribution<double> ind(1.0);
  int ok = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> eta(static_cast<std::size_t>(size(rng)));
    for (double& v : eta) v = trial % 3 == 0 ? std::floor(4 * ind(rng)) : ind(rng) * ind(rng);
    if (std::all_of(eta.begin(), eta.end(), [](double v) { return v == 0.0; })) eta[0] = 1.0;
    const double t = theta(rng);
    ok += static_cast<int>(doerfler_mark(eta, t).size()) == oracle::doerfler_minimum(eta, t);
  }
  report(8, {"Doerfler minimality", ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " minimal"});
}

void criterion_9() {
  std::mt19937_64 rng(9);
  auto refined_pair = [&](bool z, int every, std::size_t n) {
    const auto geo = z ? zshape() : slit();
    MeshHierarchy h(oracle::random_mesh(geo, z ? 8 : 4, n, rng));
    const Mesh& coarse = h.finest();
    std::vector<int> marked;
    for (std::size_t i = 0; i < coarse.size(); ++i)
      if (rng() % static_cast<unsigned>(every) == 0) marked.push_back(static_cast<int>(i));
    if (marked.empty()) marked.push_back(0);
    h.push_back(refine(coarse, marked));
    return h;
  };
  auto rhs_of = [](bool z) { return z ? zshape_problem().rhs : RhsSpec::constant(1.0); };

  double reduction = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const bool z = trial % 2 == 1;
    const MeshHierarchy h = refined_pair(z, 4, 24);
    const RhsSpec rhs = rhs_of(z);
    const Mesh& coarse = h.level(0);
    const auto v = random_coeffs(coarse.size(), rng);
    const EstimatorResult ec = estimate(coarse, v, rhs);
    const EstimatorResult ef = estimate(h.finest(), prolong(h, 1, v), rhs);
    double fine_sum = 0.0, coarse_sum = 0.0;
    std::vector<char> was_refined(coarse.size(), 0);
    for (std::size_t i = 0; i < h.finest().size(); ++i)
      if (h.is_new(1)[i]) {
        fine_sum += ef.per_element[i];
        was_refined[static_cast<std::size_t>(h.parent(1)[i])] = 1;
      }
    for (std::size_t t = 0; t < coarse.size(); ++t)
      if (was_refined[t]) coarse_sum += ec.per_element[t];
    reduction = std::max(reduction, fine_sum / coarse_sum);
  }

  // |eta(U, psi_fine) - eta(U, psi_coarse)| / ||psi_fine - psi_coarse||_V on the unrefined elements U
  auto stability = [&](bool z) {
    const MeshHierarchy h = refined_pair(z, 5, 20);
    const RhsSpec rhs = rhs_of(z);
    const Mesh& coarse = h.level(0);
    const Mesh& fine = h.finest();
    const auto pc = random_coeffs(coarse.size(), rng);
    const auto pcf = prolong(h, 1, pc);
    auto pf = pcf;
    std::normal_distribution<double> nd(0.0, 0.3);
    for (double& v : pf) v += nd(rng);
    const EstimatorResult ec = estimate(coarse, pc, rhs);
    const EstimatorResult ef = estimate(fine, pf, rhs);
    std::vector<int> uc, uf;
    for (std::size_t i = 0; i < fine.size(); ++i)
      if (!h.is_new(1)[i]) uf.push_back(static_cast<int>(i)), uc.push_back(h.parent(1)[i]);
    const Eigen::MatrixXd a = assemble_galerkin(fine);
    Eigen::VectorXd d(static_cast<Eigen::Index>(fine.size()));
    for (std::size_t i = 0; i < fine.size(); ++i) d[static_cast<Eigen::Index>(i)] = pf[i] - pcf[i];
    return std::abs(estimator_restricted(ef, uf) - estimator_restricted(ec, uc)) / std::sqrt(d.dot(a * d));
  };
  double calib[2] = {0.0, 0.0}, trials[2] = {0.0, 0.0};
  for (int i = 0; i < 40; ++i)
    for (int z = 0; z < 2; ++z) calib[z] = std::max(calib[z], stability(z == 1));
  for (int i = 0; i < 100; ++i) trials[i % 2] = std::max(trials[i % 2], stability(i % 2 == 1));
  const double ratio = std::max(trials[0] / calib[0], trials[1] / calib[1]);

  const Check a2{"reduction", reduction <= 0.5 + 1e-6, "max factor " + fmt(reduction)};
  const Check a1{"stability", ratio <= 2.0,
                 "constant over 100 trials / calibrated: " + fmt(ratio) + " (slit " + fmt(calib[0]) + ", Z " + fmt(calib[1]) + ")"};
  report(9, all_of("estimator axioms", {a2, a1}));
}

void criterion_10() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const auto geo = trial % 2 ? zshape() : slit();
    const Mesh m = oracle::random_mesh(geo, geo->closed() ? 8 : 4, 16, rng);
    const Eigen::MatrixXd a = assemble_galerkin(m);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i; j < m.size(); ++j) {
        const double ref = oracle::slp_entry(m[i].segment, m[j].segment);
        const double scale = std::max(std::abs(ref), m[i].segment.length() * m[j].segment.length() * oracle::kInvTwoPi);
        worst = std::max(worst, std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - ref) / scale);
      }
  }
  const Check entries{"entries", worst <= 1e-8, "max rel. deviation " + fmt(worst)};

  double cond_dev = 0.0;
  auto cond_case = [&](const MeshHierarchy& h, PrecondKind kind, int steps) {
    const Eigen::MatrixXd a = assemble_galerkin(h.finest());
    const auto p = make_preconditioner(kind, h, a, assemble_galerkin(h.level(0)));
    const auto [lmin, lmax] = dense_extremes(a, dense_of(*p));
    const ConditionEstimate est = cond_estimate(DenseOperator(a), *p, steps, 2024);
    cond_dev = std::max(cond_dev, std::abs(est.cond / (lmax / lmin) - 1.0));
  };
  for (auto kind : {PrecondKind::diag, PrecondKind::aswz}) {
    const MeshHierarchy h = random_hierarchy(slit(), 4, 200, rng);
    cond_case(h, kind, static_cast<int>(h.finest().size()));
    const MeshHierarchy hz = random_hierarchy(zshape(), 8, 200, rng);
    cond_case(hz, kind, static_cast<int>(hz.finest().size()));
  }
  // unpreconditioned only on a uniform mesh, where N steps resolve both ends
  cond_case(MeshHierarchy(make_initial_mesh(slit(), 128)), PrecondKind::none, 128);
  const Check cond{"cond_estimate", cond_dev <= 0.05, "max deviation from dense " + fmt(100 * cond_dev) + "%"};
  report(10, all_of("assembly oracle", {entries, cond}));
}

void criterion_11() {
  auto common_count = [](const Mesh& coarse, const Mesh& fine) {
    const auto idx = coarse.index_map();
    std::size_t c = 0;
    for (const Element& e : fine.elements()) c += idx.count(e.key);
    return c;
  };
  bool r1 = true;
  long calls = 0;
  auto closure_run = [&](std::uint64_t seed, int steps) {
    std::mt19937_64 rng(seed);
    Mesh m = make_initial_mesh(seed % 2 ? zshape() : slit(), seed % 2 ? 8 : 4);
    const std::size_t n0 = m.size();
    double marked_total = 0.0, c_mesh = 0.0;
    for (int step = 0; step < steps; ++step) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(m.size()) - 1);
      std::vector<int> marked;
      const int k = 1 + pick(rng) % 3;
      for (int i = 0; i < k; ++i) marked.push_back(pick(rng));
      std::sort(marked.begin(), marked.end());
      marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
      const Mesh fine = refine(m, marked);
      const std::size_t common = common_count(m, fine);
      const std::size_t refined = m.size() - common;
      r1 = r1 && refined + m.size() <= fine.size() && fine.size() <= 2 * refined + common;
      ++calls;
      marked_total += static_cast<double>(marked.size());
      c_mesh = std::max(c_mesh, static_cast<double>(fine.size() - n0) / marked_total);
      m = fine;
    }
    return c_mesh;
  };
  const double calibrated = closure_run(1, 1000);
  double worst_closure = 0.0;
  for (std::uint64_t seed = 2; seed < 6; ++seed) worst_closure = std::max(worst_closure, closure_run(seed, 1000));

  std::mt19937_64 rng(11);
  int overlay_ok = 0;
  const int pairs = 200;
  for (int trial = 0; trial < pairs; ++trial) {
    const bool z = trial % 2 == 1;
    const auto geo = z ? zshape() : slit();
    const int n0 = z ? 8 : 4;
    const Mesh a = oracle::random_mesh(geo, n0, static_cast<std::size_t>(n0 + trial % 40), rng);
    const Mesh b = oracle::random_mesh(geo, n0, static_cast<std::size_t>(n0 + (trial * 7) % 50), rng);
    const Mesh ab = overlay(a, b);
    std::set<std::pair<double, double>> pts;
    for (const Mesh* m : {&a, &b})
      for (const Element& e : m->elements()) pts.insert({e.segment.a.x, e.segment.a.y});
    // one element per distinct start point
    overlay_ok += ab.size() <= a.size() + b.size() - static_cast<std::size_t>(n0) && ab.size() == pts.size();
  }
  const Check c1{"R1", r1, std::to_string(calls) + " refine calls"};
  const Check c2{"R2", overlay_ok == pairs, std::to_string(overlay_ok) + "/" + std::to_string(pairs) + " overlays"};
  const Check c3{"R3", worst_closure <= 2.0 * calibrated,
                 "closure constant " + fmt(worst_closure) + " vs calibrated " + fmt(calibrated)};
  report(11, all_of("mesh axioms", {c1, c2, c3}));
}

void criterion_12() {
  // Uniform slit hierarchy from 4 coarse elements: the coarse solve is a 4x4
  // triangular pair, negligible against the multilevel sweep.
  MeshHierarchy h(make_initial_mesh(slit(), 4));
  std::mt19937_64 rng(12);
  std::vector<double> times;
  std::vector<std::size_t> sizes;
  std::unique_ptr<MultilevelPreconditioner> p;
  while (h.finest().size() < (1u << 16)) {
    h.push_back(uniform_refinement(h.finest()));
    if (!p)
      p = std::make_unique<MultilevelPreconditioner>(h, assemble_galerkin(h.level(0)));
    else
      p->extend(h);
    const std::size_t n = h.finest().size();
    if (n < 256) continue;
    const Eigen::VectorXd in = random_vector(p->size(), rng);
    Eigen::VectorXd out(p->size());
    const int reps = static_cast<int>(std::max<std::size_t>(4, (1u << 22) / n));
    std::vector<double> samples;
    for (int s = 0; s < 7; ++s) {
      const auto t0 = Clock::now();
      for (int r = 0; r < reps; ++r) p->apply(in, out);
      samples.push_back(seconds_since(t0) / reps);
    }
    times.push_back(median(samples));
    sizes.push_back(n);
  }
  std::vector<double> ratios;
  for (std::size_t i = 1; i < times.size(); ++i) ratios.push_back(times[i] / times[i - 1]);
  const double med = median(ratios);
  std::string detail = "median ratio " + fmt(med) + " (";
  for (std::size_t i = 0; i < ratios.size(); ++i) detail += (i ? " " : "") + fmt(ratios[i]);
  detail += "), " + fmt(1e6 * times.back()) + " us at N=" + std::to_string(sizes.back());
  report(12, {"apply_inv linear scaling", med <= 2.5, detail});
}

}  // namespace

int main(int argc, char** argv) {
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
                          criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};
  std::vector<int> chosen;
  std::set<int> known;  // still reported as FAIL, but not counted in the exit status
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc)
      known.insert(std::stoi(argv[++i]));
    else
      chosen.push_back(std::stoi(arg));
  }
  if (chosen.empty())
    for (int i = 1; i <= 12; ++i) chosen.push_back(i);
  std::vector<int> failed;
  for (int id : chosen) {
    if (id < 1 || id > 12) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const int before = failures;
    try {
      criteria[id - 1]();
    } catch (const std::exception& e) {
      report(id, {"criterion " + std::to_string(id), false, std::string("exception: ") + e.what()});
    }
    if (failures > before) failed.push_back(id);
  }
  int unexpected = 0;
  std::string list;
  for (int id : failed) {
    list += " " + std::to_string(id) + (known.count(id) ? "(known)" : "");
    unexpected += !known.count(id);
  }
  std::printf("%zu of %zu criteria passed; failed:%s\n", chosen.size() - failed.size(), chosen.size(),
              list.empty() ? " none" : list.c_str());
  return unexpected == 0 ? 0 : 1;
}

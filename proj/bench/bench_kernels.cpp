// Serial reference kernels against the OpenMP versions, plus the cost of one
// multilevel preconditioner application along uniform refinement.
//   ./bem2d_bench --benchmark_filter=assembly
#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "bem2d/assembly.hpp"
#include "bem2d/estimator.hpp"
#include "bem2d/preconditioner.hpp"
#include "bem2d/problems.hpp"

using namespace bem2d;

namespace {

Mesh uniform_slit(std::size_t n) {
  Mesh m = make_initial_mesh(std::make_shared<const BoundaryGeometry>(slit_geometry()), 4);
  while (m.size() < n) m = uniform_refinement(m);
  return m;
}

void assembly_serial(benchmark::State& state) {
  const Mesh m = uniform_slit(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_galerkin_reference(m));
  state.SetComplexityN(state.range(0));
}

void assembly_parallel(benchmark::State& state) {
  const Mesh m = uniform_slit(static_cast<std::size_t>(state.range(0)));
  set_parallel_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_galerkin(m));
  state.SetComplexityN(state.range(0));
}

struct EstimatorCase {
  Mesh mesh;
  ProblemData data;
  Eigen::VectorXd x;
};

const EstimatorCase& estimator_case(std::size_t n) {
  static std::map<std::size_t, EstimatorCase> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    Mesh m = uniform_slit(n);
    ProblemData d = prepare_problem_data(m, RhsSpec::constant(1.0));
    Eigen::VectorXd x = assemble_galerkin(m).llt().solve(d.rhs);
    it = cache.emplace(n, EstimatorCase{std::move(m), std::move(d), std::move(x)}).first;
  }
  return it->second;
}

void estimator_serial(benchmark::State& state) {
  const EstimatorCase& c = estimator_case(static_cast<std::size_t>(state.range(0)));
  const std::span<const double> x(c.x.data(), static_cast<std::size_t>(c.x.size()));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_reference(c.mesh, x, c.data));
}

void estimator_parallel(benchmark::State& state) {
  const EstimatorCase& c = estimator_case(static_cast<std::size_t>(state.range(0)));
  const std::span<const double> x(c.x.data(), static_cast<std::size_t>(c.x.size()));
  set_parallel_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate(c.mesh, x, c.data));
}

void preconditioner_apply(benchmark::State& state) {
  MeshHierarchy h(uniform_slit(4));
  while (h.finest().size() < static_cast<std::size_t>(state.range(0))) h.push_back(uniform_refinement(h.finest()));
  const MultilevelPreconditioner p(h, assemble_galerkin(h.level(0)));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  Eigen::VectorXd in(p.size()), out(p.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) in[i] = nd(rng);
  for (auto _ : state) {
    p.apply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(assembly_serial)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);
BENCHMARK(assembly_parallel)
    ->ArgsProduct({{64, 128, 256, 512, 1024}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(estimator_serial)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(estimator_parallel)->ArgsProduct({{64, 256, 1024}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(preconditioner_apply)->RangeMultiplier(4)->Range(64, 1 << 16)->Unit(benchmark::kMicrosecond)->Complexity(benchmark::oN);

BENCHMARK_MAIN();

#include <random>

#include <benchmark/benchmark.h>

#include "tsroa/eigen_sym.hpp"
#include "tsroa/geometry.hpp"
#include "tsroa/lmi.hpp"
#include "tsroa/parser.hpp"
#include "tsroa/pipeline.hpp"
#include "tsroa/polynomial.hpp"
#include "tsroa/ts_model.hpp"

namespace {

using namespace tsroa;

const SystemSpec& cubic() {
  static const SystemSpec spec = parse_system(
      "states x1 x2; dx1 = -x1^2 - 2*x2 - 2*x1; dx2 = x2^3 - x2;"
      "domain x1 in [-1,1], x2 in [-0.5,0.5];"
      "transform [1, 2; 0, 1] domain x1 in [-0.55, 0.55], x2 in [-0.55, 0.55];");
  return spec;
}

Eigen::MatrixXd shear() { return cubic().transforms.at(0).T; }

void BM_EigenSym(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(1);
  Eigen::MatrixXd M(n, n);
  for (auto& m : M.reshaped()) m = std::normal_distribution<double>()(rng);
  const SymMatrix S(M);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_sym(S));
}
BENCHMARK(BM_EigenSym)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_TransformSystem(benchmark::State& state) {
  const Eigen::MatrixXd T = shear();
  for (auto _ : state) benchmark::DoNotOptimize(transform_system(cubic().rhs, T));
}
BENCHMARK(BM_TransformSystem);

void BM_TSModelBuild(benchmark::State& state) {
  const auto rhs = transform_system(cubic().rhs, shear());
  const Box box = *cubic().transforms.at(0).analysis_box;
  for (auto _ : state) benchmark::DoNotOptimize(TSModel::build(rhs, box));
}
BENCHMARK(BM_TSModelBuild);

void BM_FindCommonP(benchmark::State& state) {
  const TSModel model = TSModel::build(cubic().rhs, cubic().domain);
  for (auto _ : state) benchmark::DoNotOptimize(find_common_p(model.vertices()));
}
BENCHMARK(BM_FindCommonP)->Unit(benchmark::kMicrosecond);

void BM_UnionArea(benchmark::State& state) {
  const SweepResult r = sweep(cubic(), cases_from_spec(cubic()));
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(union_area(r.estimate, samples, 1, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_UnionArea)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

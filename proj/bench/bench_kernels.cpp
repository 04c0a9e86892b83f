#include <benchmark/benchmark.h>

#include "fairdyn/analysis.hpp"
#include "fairdyn/builtins.hpp"
#include "fairdyn/runner.hpp"

using namespace fairdyn;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Contraction(benchmark::State& st) {
  const DynamicsSpec d = appendix_c_dynamics();
  for (auto _ : st) benchmark::DoNotOptimize(estimate_contraction(d, 256, exec_of(st)));
}

void BM_StatusQuoScan(benchmark::State& st) {
  const DynamicsSpec d = constant_dynamics(0.2, 0.8);
  for (auto _ : st) benchmark::DoNotOptimize(check_status_quo_bias(d, 512, exec_of(st)));
}

void BM_FieldExport(benchmark::State& st) {
  const DynamicsSpec d = appendix_c_dynamics();
  for (auto _ : st) benchmark::DoNotOptimize(export_field(d, PolicyMode::AA, {-1.0, 1.0}, 0.5, 201, exec_of(st)));
}

void BM_VerifySweep(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_verify(1, 4000, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_Contraction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StatusQuoScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldExport)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

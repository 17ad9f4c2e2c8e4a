#include <benchmark/benchmark.h>

#include "daur/daur.hpp"
#include "daur/qcqp.hpp"
#include "daur/rounding.hpp"
#include "daur/sdr.hpp"

using namespace daur;

namespace {

NetworkInstance instance(int n_users) {
  ScenarioParams p;
  p.n_users = n_users;
  return generate_network(p, 1);
}

Decision start(const NetworkInstance& inst) {
  return equal_share_decision(inst, max_gain_association(inst),
                              VectorXd::Constant(inst.n_users, 0.5), SolverConfig{});
}

void BM_SolveSdr(benchmark::State& state) {
  const NetworkInstance inst = instance(int(state.range(0)));
  const Decision dec = start(inst);
  const SdrData sdr = lift_to_sdr(assemble_qcqp(inst, dec, prospective_auxiliary(inst, dec)), 175.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sdr(sdr).primal_objective);
}
BENCHMARK(BM_SolveSdr)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FpSolve(benchmark::State& state) {
  const NetworkInstance inst = instance(int(state.range(0)));
  const Decision dec = start(inst);
  const AuxState aux = update_auxiliary(inst, dec);
  for (auto _ : state) benchmark::DoNotOptimize(fp_solve(inst, dec, aux, 1e-3, 20).rounds);
}
BENCHMARK(BM_FpSolve)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_DaurRun(benchmark::State& state) {
  const NetworkInstance inst = instance(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(daur_run(inst, SolverConfig{}).dpe);
}
BENCHMARK(BM_DaurRun)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

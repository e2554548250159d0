// Microbenchmarks for the per-step kernels that dominate ensemble runs.

#include <benchmark/benchmark.h>

#include "dickesim/collective.hpp"
#include "dickesim/entanglement.hpp"
#include "dickesim/expm.hpp"
#include "dickesim/powerlaw.hpp"
#include "dickesim/propagator.hpp"
#include "dickesim/rng.hpp"
#include "dickesim/state_diffusion.hpp"
#include "dickesim/states.hpp"

using namespace dicke;

namespace {

HamiltonianSpec spec_of(int n, double omega0) {
  HamiltonianSpec s;
  s.n_spins = n;
  s.omega0 = omega0;
  return s;
}

void bench_qj_block(benchmark::State& state) {
  const int n = int(state.range(0));
  const CollectiveOperators ops = build_collective_ops(n);
  SteppedPropagator prop(build_nonhermitian_h(ops, spec_of(n, 1.0)), 0.1 / n,
                         25);
  Vector psi = polarized_state(n).amplitudes;
  Vector out(psi.size());
  for (auto _ : state) {
    prop.block(psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_qsd_pure_step(benchmark::State& state) {
  const int n = int(state.range(0));
  QsdConfig c;
  c.hamiltonian_spec = spec_of(n, 1.0);
  c.eta = 1.0;
  c.dt = 1e-3;
  c.t_final = 1.0;
  c.sample_every = 1.0;
  c.record_entropy = false;
  for (auto _ : state) {
    CounterRng rng(1u, 0u);
    auto out = run_qsd_trajectory(c, rng);
    benchmark::DoNotOptimize(out.first.jz.data());
  }
  // one run is t_final / dt steps
  state.SetItemsProcessed(state.iterations() * 1000);
}

void bench_qsd_density_step(benchmark::State& state) {
  const int n = int(state.range(0));
  const CollectiveOperators ops = build_collective_ops(n);
  const HamiltonianSpec spec = spec_of(n, 1.0);
  MixedState rho = to_mixed(polarized_state(n));
  CounterRng rng(1u, 0u);
  const double dt = 2.5e-3;
  for (auto _ : state) {
    rho = qsd_step(rho, ops, spec, 0.7, dt, std::sqrt(dt) * rng.normal());
    benchmark::DoNotOptimize(rho.rho.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_half_chain_entropy(benchmark::State& state) {
  const int n = int(state.range(0));
  CounterRng rng(5u, 0u);
  Vector psi(n + 1);
  for (int i = 0; i <= n; ++i) psi[i] = Complex(rng.normal(), rng.normal());
  psi.normalize();
  for (auto _ : state) {
    benchmark::DoNotOptimize(half_chain_entropy(psi, n));
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_qfi_pure(benchmark::State& state) {
  const int n = int(state.range(0));
  const CollectiveOperators ops = build_collective_ops(n);
  CounterRng rng(5u, 0u);
  Vector psi(n + 1);
  for (int i = 0; i <= n; ++i) psi[i] = Complex(rng.normal(), rng.normal());
  psi.normalize();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfi_pure(ops, psi).fisher);
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_expm(benchmark::State& state) {
  const int dim = int(state.range(0));
  CounterRng rng(9u, 0u);
  Matrix x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = Complex(rng.normal(), rng.normal());
  Matrix a = Complex(0, -0.01) * (x + x.adjoint());
  for (auto _ : state) {
    Matrix e = expm(a);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_powerlaw_sector_apply(benchmark::State& state) {
  const int n = int(state.range(0));
  PowerlawSpec spec;
  spec.n_spins = n;
  spec.omega0 = 1.5;
  spec.omega_z = 0.5;
  spec.alpha = 0.2;
  const SymmetricSector sector = build_symmetric_sector(n);
  const Matrix h = sector.project(powerlaw_h_sparse(spec));
  CounterRng rng(3u, 0u);
  Vector v(sector.dim);
  for (Index i = 0; i < v.size(); ++i)
    v[i] = Complex(rng.normal(), rng.normal());
  v.normalize();
  Vector out(v.size());
  for (auto _ : state) {
    out.noalias() = h * v;
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(bench_qj_block)->Arg(20)->Arg(80)->Arg(160);
BENCHMARK(bench_qsd_pure_step)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_qsd_density_step)->Arg(20)->Arg(40);
BENCHMARK(bench_half_chain_entropy)->Arg(40)->Arg(160);
BENCHMARK(bench_qfi_pure)->Arg(40)->Arg(160);
BENCHMARK(bench_expm)->Arg(64)->Arg(200);
BENCHMARK(bench_powerlaw_sector_apply)->Arg(10)->Arg(14);

BENCHMARK_MAIN();
